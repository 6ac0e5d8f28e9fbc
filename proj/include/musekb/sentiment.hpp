#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "musekb/corpus.hpp"

namespace musekb {

enum class Pos { Noun, Adjective, Verb, Other };
std::string to_string(Pos p);

// Word polarities in [-1,1] plus a negation-term set disjoint from them.
struct SentimentLexicon {
    std::unordered_map<std::string, double> entries;  // folded word -> polarity
    std::set<std::string> negations;                  // folded words

    bool is_sentiment(const std::string& folded_word) const {
        return entries.count(folded_word) != 0;
    }

    // Lexicon file: one "word polarity" pair per line (tab or space
    // separated); '#' starts a comment. Negations file: one word per line.
    // Polarities outside [-1,1], duplicate words, or a negation term that is
    // also a lexicon entry are validation errors.
    static SentimentLexicon load(const std::string& lexicon_path,
                                 const std::optional<std::string>& negations_path = {});
};

// Per-word tagger over folded tokens; pluggable so an external tagger can
// replace the built-in rules without touching the pipeline.
class PosTagger {
  public:
    virtual ~PosTagger() = default;
    virtual Pos tag(std::string_view folded_word) const = 0;
};

// Closed-class function words and auxiliaries, a small adjective list, and
// suffix heuristics; everything else defaults to Noun.
class RulePosTagger : public PosTagger {
  public:
    Pos tag(std::string_view folded_word) const override;
};

struct TaggedToken {
    std::string word;  // folded
    Pos pos = Pos::Other;
};

struct TaggedSentence {
    std::vector<TaggedToken> tokens;
    size_t sentence_index = 0;
};

// Splits on . ! ? and tags each token; segments without tokens are dropped
// and do not consume an index.
std::vector<TaggedSentence> tag_sentences(std::string_view text, const PosTagger& tagger);

enum class AspectKind { Bigram, SingleNoun };
std::string to_string(AspectKind k);

struct AspectCandidate {
    std::string aspect;  // "w1 w2" for bigrams
    AspectKind kind = AspectKind::SingleNoun;
    size_t head = 0;  // token index of the head noun (second word of a bigram)
};

// One left-to-right pass: adjacent (Noun,Noun) or (Adjective,Noun) pairs
// become bigrams — except pairs whose adjective is a lexicon entry — and
// consume both tokens; remaining nouns become provisional single-noun
// candidates awaiting corpus-level validation. Candidates come out in
// position order.
std::vector<AspectCandidate> extract_aspects(const TaggedSentence& sentence,
                                             const SentimentLexicon& lexicon);

struct AspectOpinion {
    std::string aspect;
    AspectKind kind = AspectKind::SingleNoun;
    std::optional<std::string> sentiment_word;  // w_min; absent <=> neutral
    std::optional<double> score;                // absent <=> neutral
    bool negated = false;
    size_t sentence_index = 0;
};

struct SentimentConfig {
    double min_ratio = 0.3;   // single-noun validation: co-occurrence ratio
    long min_support = 2;     // single-noun validation: sentence count
    long negation_window = 4; // tokens around w_min that can flip the sign
};

// Nearest lexicon word to the aspect head by token distance (ties ->
// leftmost) sets the score; a negation term within negation_window tokens of
// that word flips the sign. No lexicon word in the sentence -> neutral.
AspectOpinion score_aspect(const TaggedSentence& sentence, const AspectCandidate& candidate,
                           const SentimentLexicon& lexicon, const SentimentConfig& cfg = {});

struct NounUsage {
    long occurrences = 0;     // sentences containing the noun as a candidate
    long with_sentiment = 0;  // ... that also contain a lexicon word
};

// Sentence-level usage counts for every single-noun candidate (distinct per
// sentence) across the given sentences.
std::map<std::string, NounUsage> count_noun_usage(const std::vector<TaggedSentence>& sentences,
                                                  const SentimentLexicon& lexicon);

// Noun kept iff with_sentiment/occurrences >= min_ratio and occurrences >=
// min_support.
std::set<std::string> validate_single_nouns(const std::map<std::string, NounUsage>& usage,
                                            double min_ratio, long min_support);

// Mean of the non-neutral opinion scores; 0.0 when every opinion is neutral.
double review_score(const std::vector<AspectOpinion>& opinions);

struct ReviewAnalysis {
    std::string doc_id;
    std::vector<AspectOpinion> opinions;
    double score = 0.0;
};

// Full pipeline over a review corpus: tag + extract per document, validate
// single nouns corpus-wide, then score. Results are indexed like docs and
// identical between the parallel and serial variants.
std::vector<ReviewAnalysis> analyze_corpus(const std::vector<Document>& docs,
                                           const SentimentLexicon& lexicon,
                                           const PosTagger& tagger,
                                           const SentimentConfig& cfg = {});
std::vector<ReviewAnalysis> analyze_corpus_serial(const std::vector<Document>& docs,
                                                  const SentimentLexicon& lexicon,
                                                  const PosTagger& tagger,
                                                  const SentimentConfig& cfg = {});

} // namespace musekb
