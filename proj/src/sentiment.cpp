#include "musekb/sentiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <unordered_set>

#include "musekb/errors.hpp"
#include "musekb/text.hpp"

namespace musekb {

std::string to_string(Pos p) {
    switch (p) {
        case Pos::Noun: return "noun";
        case Pos::Adjective: return "adjective";
        case Pos::Verb: return "verb";
        case Pos::Other: return "other";
    }
    return {};
}

std::string to_string(AspectKind k) {
    return k == AspectKind::Bigram ? "bigram" : "single_noun";
}

namespace {

std::string fold_word(std::string_view w) { return fold_token(w); }

} // namespace

SentimentLexicon SentimentLexicon::load(const std::string& lexicon_path,
                                        const std::optional<std::string>& negations_path) {
    SentimentLexicon lex;
    {
        std::ifstream in(lexicon_path, std::ios::binary);
        if (!in) throw IoError("cannot open '" + lexicon_path + "' for reading");
        std::string line;
        size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const size_t ws = line.find_first_of(" \t");
            std::string word = ws == std::string::npos ? line : line.substr(0, ws);
            word = fold_word(word);
            if (word.empty()) continue;
            if (ws == std::string::npos)
                throw ParseError(lexicon_path + ":" + std::to_string(lineno) +
                                 ": missing polarity for '" + word + "'");
            double polarity = 0.0;
            try {
                size_t used = 0;
                const std::string rest = line.substr(ws + 1);
                polarity = std::stod(rest, &used);
                while (used < rest.size() &&
                       (rest[used] == ' ' || rest[used] == '\t' || rest[used] == '\r'))
                    ++used;
                if (used != rest.size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw ParseError(lexicon_path + ":" + std::to_string(lineno) +
                                 ": bad polarity for '" + word + "'");
            }
            if (!(polarity >= -1.0 && polarity <= 1.0))
                throw ValidationError(lexicon_path + ":" + std::to_string(lineno) +
                                      ": polarity outside [-1,1]");
            if (!lex.entries.emplace(word, polarity).second)
                throw ValidationError(lexicon_path + ":" + std::to_string(lineno) +
                                      ": duplicate word '" + word + "'");
        }
    }
    if (negations_path) {
        std::ifstream in(*negations_path, std::ios::binary);
        if (!in) throw IoError("cannot open '" + *negations_path + "' for reading");
        std::string line;
        size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string word = fold_word(line);
            if (word.empty()) continue;
            if (lex.entries.count(word))
                throw ValidationError(*negations_path + ":" + std::to_string(lineno) +
                                      ": negation '" + word + "' is also a lexicon entry");
            lex.negations.insert(word);
        }
    }
    return lex;
}

namespace {

const std::unordered_set<std::string>& function_words() {
    static const std::unordered_set<std::string> kWords = {
        "the", "a",     "an",    "and",   "or",     "but",    "of",    "in",
        "on",  "at",    "to",    "for",   "with",   "from",   "by",    "as",
        "that", "this", "these", "those", "it",     "its",    "their", "his",
        "her", "they",  "he",    "she",   "we",     "you",    "i",     "not",
        "no",  "never", "very",  "so",    "too",    "also",   "than",  "then",
        "there", "here", "when", "while", "which",  "who",    "whom",  "whose",
        "what", "all",  "any",   "some",  "each",   "every",  "both",  "few",
        "more", "most", "other", "into",  "over",   "under",  "about", "after",
        "before", "between", "during", "through",  "up",     "down",  "out",
        "off", "again", "once",  "only",  "own",    "same",   "such",  "nor",
        "just", "because", "until", "against", "hardly", "without", "if",
        "how", "why",  "where", "am",    "my",     "your",   "our",   "us",
        "them", "me",  "him",   "yet",   "s",      "t",      "nt",    "dont",
    };
    return kWords;
}

const std::unordered_set<std::string>& auxiliary_verbs() {
    static const std::unordered_set<std::string> kWords = {
        "is",   "are",  "was",   "were",  "be",    "been", "being", "has",
        "have", "had",  "do",    "does",  "did",   "can",  "could", "will",
        "would", "should", "may", "might", "must", "shall", "get",  "gets",
        "got",  "goes", "go",    "went",  "make",  "makes", "made", "seems",
        "seem", "feels", "feel", "sounds",
    };
    return kWords;
}

const std::unordered_set<std::string>& builtin_adjectives() {
    static const std::unordered_set<std::string> kWords = {
        "good",  "great", "bad",   "poor",  "nice",  "fine",  "new",   "old",
        "young", "live",  "slow",  "fast",  "early", "late",  "loud",  "quiet",
        "soft",  "hard",  "strong", "weak", "deep",  "rich",  "warm",  "cold",
        "dark",  "bright", "clean", "pure", "raw",   "smooth", "rough", "sweet",
        "fresh", "true",  "real",  "full",  "high",  "low",   "long",  "short",
        "big",   "small", "vocal", "best",  "worst", "better", "worse",
        "perfect", "superb", "awful", "dull", "bland", "crisp", "tight",
        "loose", "amazing", "boring", "stunning", "outstanding", "charming",
        "compelling", "disappointing", "satisfying", "refreshing",
    };
    return kWords;
}

bool has_suffix(std::string_view w, std::string_view suffix) {
    return w.size() > suffix.size() &&
           w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

Pos RulePosTagger::tag(std::string_view folded_word) const {
    const std::string w(folded_word);
    if (w.empty()) return Pos::Other;
    for (char c : w)
        if (c >= '0' && c <= '9') return Pos::Other;
    if (function_words().count(w)) return Pos::Other;
    if (auxiliary_verbs().count(w)) return Pos::Verb;
    if (builtin_adjectives().count(w)) return Pos::Adjective;
    // nominal -ment beats the adjectival -ent suffix below
    if (has_suffix(w, "ment")) return Pos::Noun;
    static constexpr std::array<std::string_view, 12> kAdjSuffixes = {
        "ous", "ful", "ive", "able", "ible", "less",
        "ish", "ic",  "ical", "ant", "ent",  "ary",
    };
    for (std::string_view s : kAdjSuffixes)
        if (has_suffix(w, s)) return Pos::Adjective;
    if (w.size() >= 5 && (has_suffix(w, "ed") || has_suffix(w, "ing")))
        return Pos::Verb;
    return Pos::Noun;
}

std::vector<TaggedSentence> tag_sentences(std::string_view text, const PosTagger& tagger) {
    std::vector<TaggedSentence> out;
    size_t start = 0;
    auto flush = [&](size_t end) {
        const std::string_view segment = text.substr(start, end - start);
        TaggedSentence sentence;
        for (const Token& t : tokenize(segment)) {
            TaggedToken tok;
            tok.word = fold_word(t.text);
            tok.pos = tagger.tag(tok.word);
            sentence.tokens.push_back(std::move(tok));
        }
        if (!sentence.tokens.empty()) {
            sentence.sentence_index = out.size();
            out.push_back(std::move(sentence));
        }
    };
    for (size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '.' || c == '!' || c == '?') {
            flush(i);
            start = i + 1;
        }
    }
    flush(text.size());
    return out;
}

std::vector<AspectCandidate> extract_aspects(const TaggedSentence& sentence,
                                             const SentimentLexicon& lexicon) {
    std::vector<AspectCandidate> out;
    const auto& toks = sentence.tokens;
    size_t i = 0;
    while (i < toks.size()) {
        if (i + 1 < toks.size() && toks[i + 1].pos == Pos::Noun) {
            const bool noun_pair = toks[i].pos == Pos::Noun;
            const bool adj_pair = toks[i].pos == Pos::Adjective &&
                                  !lexicon.is_sentiment(toks[i].word);
            if (noun_pair || adj_pair) {
                AspectCandidate c;
                c.aspect = toks[i].word + " " + toks[i + 1].word;
                c.kind = AspectKind::Bigram;
                c.head = i + 1;
                out.push_back(std::move(c));
                i += 2;
                continue;
            }
        }
        if (toks[i].pos == Pos::Noun) {
            AspectCandidate c;
            c.aspect = toks[i].word;
            c.kind = AspectKind::SingleNoun;
            c.head = i;
            out.push_back(std::move(c));
        }
        ++i;
    }
    return out;
}

AspectOpinion score_aspect(const TaggedSentence& sentence, const AspectCandidate& candidate,
                           const SentimentLexicon& lexicon, const SentimentConfig& cfg) {
    if (candidate.head >= sentence.tokens.size())
        throw ConfigError("aspect head outside sentence");
    AspectOpinion op;
    op.aspect = candidate.aspect;
    op.kind = candidate.kind;
    op.sentence_index = sentence.sentence_index;

    const auto& toks = sentence.tokens;
    size_t best = toks.size();
    size_t best_dist = 0;
    for (size_t j = 0; j < toks.size(); ++j) {
        if (!lexicon.is_sentiment(toks[j].word)) continue;
        const size_t dist = j > candidate.head ? j - candidate.head : candidate.head - j;
        if (best == toks.size() || dist < best_dist) {
            best = j;
            best_dist = dist;
        }
    }
    if (best == toks.size()) return op;  // neutral

    op.sentiment_word = toks[best].word;
    double score = lexicon.entries.at(toks[best].word);
    for (size_t k = 0; k < toks.size(); ++k) {
        if (!lexicon.negations.count(toks[k].word)) continue;
        const size_t dist = k > best ? k - best : best - k;
        if (dist <= static_cast<size_t>(cfg.negation_window)) {
            op.negated = true;
            score = -score;
            break;
        }
    }
    op.score = score;
    return op;
}

std::map<std::string, NounUsage> count_noun_usage(const std::vector<TaggedSentence>& sentences,
                                                  const SentimentLexicon& lexicon) {
    std::map<std::string, NounUsage> usage;
    for (const TaggedSentence& s : sentences) {
        bool any_sentiment = false;
        for (const TaggedToken& t : s.tokens)
            if (lexicon.is_sentiment(t.word)) {
                any_sentiment = true;
                break;
            }
        std::set<std::string> nouns;
        for (const AspectCandidate& c : extract_aspects(s, lexicon))
            if (c.kind == AspectKind::SingleNoun) nouns.insert(c.aspect);
        for (const std::string& n : nouns) {
            NounUsage& u = usage[n];
            ++u.occurrences;
            if (any_sentiment) ++u.with_sentiment;
        }
    }
    return usage;
}

std::set<std::string> validate_single_nouns(const std::map<std::string, NounUsage>& usage,
                                            double min_ratio, long min_support) {
    if (!(min_ratio >= 0.0 && min_ratio <= 1.0))
        throw ConfigError("min_ratio must lie in [0,1]");
    if (min_support < 0) throw ConfigError("min_support must be >= 0");
    std::set<std::string> retained;
    for (const auto& [noun, u] : usage) {
        if (u.occurrences < min_support) continue;
        if (u.occurrences == 0) continue;
        const double ratio =
            static_cast<double>(u.with_sentiment) / static_cast<double>(u.occurrences);
        if (ratio >= min_ratio) retained.insert(noun);
    }
    return retained;
}

double review_score(const std::vector<AspectOpinion>& opinions) {
    double sum = 0.0;
    long n = 0;
    for (const AspectOpinion& op : opinions)
        if (op.score) {
            sum += *op.score;
            ++n;
        }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

namespace {

struct DocSentences {
    std::vector<TaggedSentence> sentences;
    std::vector<std::vector<AspectCandidate>> candidates;  // per sentence
};

std::vector<ReviewAnalysis> analyze_corpus_impl(const std::vector<Document>& docs,
                                                const SentimentLexicon& lexicon,
                                                const PosTagger& tagger,
                                                const SentimentConfig& cfg, bool parallel) {
    const auto n = static_cast<long>(docs.size());
    std::vector<DocSentences> prepared(docs.size());

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (long d = 0; d < n; ++d) {
        DocSentences& p = prepared[d];
        p.sentences = tag_sentences(docs[d].text, tagger);
        p.candidates.reserve(p.sentences.size());
        for (const TaggedSentence& s : p.sentences)
            p.candidates.push_back(extract_aspects(s, lexicon));
    }

    // Corpus-wide single-noun validation: deterministic because the counts
    // are additive and merged in document order.
    std::map<std::string, NounUsage> usage;
    for (const DocSentences& p : prepared) {
        const auto part = count_noun_usage(p.sentences, lexicon);
        for (const auto& [noun, u] : part) {
            usage[noun].occurrences += u.occurrences;
            usage[noun].with_sentiment += u.with_sentiment;
        }
    }
    const std::set<std::string> retained =
        validate_single_nouns(usage, cfg.min_ratio, cfg.min_support);

    std::vector<ReviewAnalysis> out(docs.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (long d = 0; d < n; ++d) {
        ReviewAnalysis& r = out[d];
        r.doc_id = docs[d].id;
        const DocSentences& p = prepared[d];
        for (size_t s = 0; s < p.sentences.size(); ++s)
            for (const AspectCandidate& c : p.candidates[s]) {
                if (c.kind == AspectKind::SingleNoun && !retained.count(c.aspect)) continue;
                r.opinions.push_back(score_aspect(p.sentences[s], c, lexicon, cfg));
            }
        r.score = review_score(r.opinions);
    }
    return out;
}

} // namespace

std::vector<ReviewAnalysis> analyze_corpus(const std::vector<Document>& docs,
                                           const SentimentLexicon& lexicon,
                                           const PosTagger& tagger,
                                           const SentimentConfig& cfg) {
    return analyze_corpus_impl(docs, lexicon, tagger, cfg, true);
}

std::vector<ReviewAnalysis> analyze_corpus_serial(const std::vector<Document>& docs,
                                                  const SentimentLexicon& lexicon,
                                                  const PosTagger& tagger,
                                                  const SentimentConfig& cfg) {
    return analyze_corpus_impl(docs, lexicon, tagger, cfg, false);
}

} // namespace musekb
