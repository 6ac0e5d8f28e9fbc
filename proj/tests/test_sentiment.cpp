#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "musekb/sentiment.hpp"

using namespace musekb;

namespace {

SentimentLexicon fixture_lexicon() {
    SentimentLexicon lex;
    lex.entries = {{"great", 0.75}, {"good", 0.6},      {"excellent", 0.9},
                   {"awful", -0.8}, {"mediocre", -0.4}, {"lovely", 0.55}};
    lex.negations = {"not", "never", "no", "hardly", "without"};
    return lex;
}

TaggedSentence tagged(const std::vector<std::pair<std::string, Pos>>& words,
                      size_t index = 0) {
    TaggedSentence s;
    s.sentence_index = index;
    for (const auto& [w, p] : words) s.tokens.push_back({w, p});
    return s;
}

Document review_doc(const std::string& id, const std::string& text) {
    Document d;
    d.id = id;
    d.title = id;
    d.text = text;
    d.doc_type = DocType::Review;
    d.source = "fixture";
    return d;
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& p, const std::string& body) : path(p) {
        std::ofstream out(path, std::ios::binary);
        out << body;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("lexicon files load and validate") {
    TempFile lex("/tmp/musekb_lex1.txt",
                 "# polarity table\n"
                 "great 0.75\n"
                 "awful\t-0.8\n"
                 "\n"
                 "Good 0.6  # folded on load\n");
    TempFile neg("/tmp/musekb_neg1.txt", "not\nNever\n");
    const auto loaded = SentimentLexicon::load(lex.path, neg.path);
    CHECK(loaded.entries.at("great") == doctest::Approx(0.75));
    CHECK(loaded.entries.at("awful") == doctest::Approx(-0.8));
    CHECK(loaded.entries.at("good") == doctest::Approx(0.6));
    CHECK(loaded.negations.count("not") == 1);
    CHECK(loaded.negations.count("never") == 1);

    TempFile out_of_range("/tmp/musekb_lex2.txt", "great 1.5\n");
    CHECK_THROWS_AS(SentimentLexicon::load(out_of_range.path), ValidationError);

    TempFile duplicate("/tmp/musekb_lex3.txt", "great 0.5\nGreat 0.7\n");
    CHECK_THROWS_AS(SentimentLexicon::load(duplicate.path), ValidationError);

    TempFile missing("/tmp/musekb_lex4.txt", "great\n");
    CHECK_THROWS_AS(SentimentLexicon::load(missing.path), ParseError);

    TempFile garbage("/tmp/musekb_lex5.txt", "great 0.5x\n");
    CHECK_THROWS_AS(SentimentLexicon::load(garbage.path), ParseError);

    TempFile lex_ok("/tmp/musekb_lex6.txt", "great 0.5\n");
    TempFile neg_clash("/tmp/musekb_neg2.txt", "great\n");
    CHECK_THROWS_AS(SentimentLexicon::load(lex_ok.path, neg_clash.path), ValidationError);

    CHECK_THROWS_AS(SentimentLexicon::load("/tmp/no_such_lexicon.txt"), IoError);
}

TEST_CASE("rule tagger covers the word classes") {
    RulePosTagger tagger;
    CHECK(tagger.tag("guitar") == Pos::Noun);
    CHECK(tagger.tag("album") == Pos::Noun);
    CHECK(tagger.tag("good") == Pos::Adjective);
    CHECK(tagger.tag("great") == Pos::Adjective);
    CHECK(tagger.tag("wonderful") == Pos::Adjective);   // -ful
    CHECK(tagger.tag("melodic") == Pos::Adjective);     // -ic
    CHECK(tagger.tag("arrangement") == Pos::Noun);      // -ment beats -ent
    CHECK(tagger.tag("is") == Pos::Verb);
    CHECK(tagger.tag("was") == Pos::Verb);
    CHECK(tagger.tag("playing") == Pos::Verb);          // long -ing
    CHECK(tagger.tag("recorded") == Pos::Verb);         // long -ed
    CHECK(tagger.tag("the") == Pos::Other);
    CHECK(tagger.tag("not") == Pos::Other);
    CHECK(tagger.tag("1959") == Pos::Other);
    CHECK(tagger.tag("red") == Pos::Noun);  // too short for the -ed rule
    CHECK(tagger.tag("") == Pos::Other);
}

TEST_CASE("sentences split on terminators and skip empties") {
    RulePosTagger tagger;
    const auto sents = tag_sentences("Great album. Really bad mix!", tagger);
    REQUIRE(sents.size() == 2);
    CHECK(sents[0].sentence_index == 0);
    CHECK(sents[1].sentence_index == 1);
    REQUIRE(sents[0].tokens.size() == 2);
    CHECK(sents[0].tokens[0].word == "great");
    CHECK(sents[0].tokens[1].word == "album");

    const auto dots = tag_sentences("One.. Two.", tagger);
    REQUIRE(dots.size() == 2);
    CHECK(dots[0].tokens[0].word == "one");
    CHECK(dots[1].tokens[0].word == "two");
    CHECK(dots[1].sentence_index == 1);

    CHECK(tag_sentences("", tagger).empty());
    CHECK(tag_sentences("...!?", tagger).empty());
}

TEST_CASE("noun-noun pairs become bigrams") {
    const auto lex = fixture_lexicon();
    const auto s = tagged({{"chorus", Pos::Noun}, {"arrangement", Pos::Noun}});
    const auto cands = extract_aspects(s, lex);
    REQUIRE(cands.size() == 1);
    CHECK(cands[0].aspect == "chorus arrangement");
    CHECK(cands[0].kind == AspectKind::Bigram);
    CHECK(cands[0].head == 1);
}

TEST_CASE("sentiment adjectives do not start bigrams") {
    const auto lex = fixture_lexicon();
    const auto s = tagged({{"excellent", Pos::Adjective}, {"sound", Pos::Noun}});
    const auto cands = extract_aspects(s, lex);
    REQUIRE(cands.size() == 1);
    CHECK(cands[0].aspect == "sound");
    CHECK(cands[0].kind == AspectKind::SingleNoun);
    CHECK(cands[0].head == 1);

    // A neutral adjective keeps the bigram.
    const auto s2 = tagged({{"acoustic", Pos::Adjective}, {"sound", Pos::Noun}});
    const auto cands2 = extract_aspects(s2, lex);
    REQUIRE(cands2.size() == 1);
    CHECK(cands2[0].aspect == "acoustic sound");
    CHECK(cands2[0].kind == AspectKind::Bigram);
}

TEST_CASE("verb-only sentences yield nothing") {
    const auto lex = fixture_lexicon();
    const auto s = tagged({{"was", Pos::Verb}, {"recorded", Pos::Verb}});
    CHECK(extract_aspects(s, lex).empty());
}

TEST_CASE("a bigram consumes both tokens") {
    const auto lex = fixture_lexicon();
    const auto s = tagged(
        {{"guitar", Pos::Noun}, {"solo", Pos::Noun}, {"section", Pos::Noun}});
    const auto cands = extract_aspects(s, lex);
    REQUIRE(cands.size() == 2);
    CHECK(cands[0].aspect == "guitar solo");
    CHECK(cands[0].kind == AspectKind::Bigram);
    CHECK(cands[1].aspect == "section");
    CHECK(cands[1].kind == AspectKind::SingleNoun);
}

TEST_CASE("nearest lexicon word scores the aspect") {
    const auto lex = fixture_lexicon();
    const auto s = tagged({{"the", Pos::Other},
                           {"guitar", Pos::Noun},
                           {"is", Pos::Verb},
                           {"great", Pos::Adjective}});
    const auto cands = extract_aspects(s, lex);
    REQUIRE(cands.size() == 1);
    const auto op = score_aspect(s, cands[0], lex);
    CHECK(op.aspect == "guitar");
    REQUIRE(op.score.has_value());
    CHECK(*op.score == doctest::Approx(0.75));
    CHECK(*op.sentiment_word == "great");
    CHECK(!op.negated);
}

TEST_CASE("negation within four tokens flips the sign") {
    const auto lex = fixture_lexicon();
    const auto s = tagged({{"not", Pos::Other},
                           {"a", Pos::Other},
                           {"good", Pos::Adjective},
                           {"album", Pos::Noun}});
    const auto cands = extract_aspects(s, lex);
    REQUIRE(cands.size() == 1);
    CHECK(cands[0].aspect == "album");
    const auto op = score_aspect(s, cands[0], lex);
    REQUIRE(op.score.has_value());
    CHECK(*op.score == doctest::Approx(-0.6));
    CHECK(op.negated);
    CHECK(*op.sentiment_word == "good");
}

TEST_CASE("distant negation does not reach") {
    const auto lex = fixture_lexicon();
    // "not" is 5 tokens from "good": outside the window.
    const auto s = tagged({{"not", Pos::Other},
                           {"x1", Pos::Other},
                           {"x2", Pos::Other},
                           {"x3", Pos::Other},
                           {"x4", Pos::Other},
                           {"good", Pos::Adjective},
                           {"album", Pos::Noun}});
    AspectCandidate c;
    c.aspect = "album";
    c.kind = AspectKind::SingleNoun;
    c.head = 6;
    const auto op = score_aspect(s, c, lex);
    REQUIRE(op.score.has_value());
    CHECK(*op.score == doctest::Approx(0.6));
    CHECK(!op.negated);
}

TEST_CASE("sentences without lexicon words are neutral") {
    const auto lex = fixture_lexicon();
    const auto s = tagged({{"the", Pos::Other},
                           {"album", Pos::Noun},
                           {"arrived", Pos::Verb},
                           {"yesterday", Pos::Noun}});
    const auto cands = extract_aspects(s, lex);
    REQUIRE(!cands.empty());
    const auto op = score_aspect(s, cands[0], lex);
    CHECK(!op.score.has_value());
    CHECK(!op.sentiment_word.has_value());
    CHECK(!op.negated);
}

TEST_CASE("distance ties resolve to the leftmost word") {
    const auto lex = fixture_lexicon();
    // "great" and "awful" are both 1 token from the head.
    const auto s = tagged({{"great", Pos::Adjective},
                           {"album", Pos::Noun},
                           {"awful", Pos::Adjective}});
    AspectCandidate c;
    c.aspect = "album";
    c.kind = AspectKind::SingleNoun;
    c.head = 1;
    const auto op = score_aspect(s, c, lex);
    REQUIRE(op.score.has_value());
    CHECK(*op.sentiment_word == "great");
    CHECK(*op.score == doctest::Approx(0.75));
}

TEST_CASE("bad aspect positions are rejected") {
    const auto lex = fixture_lexicon();
    const auto s = tagged({{"album", Pos::Noun}});
    AspectCandidate c;
    c.aspect = "album";
    c.head = 5;
    CHECK_THROWS_AS(score_aspect(s, c, lex), ConfigError);
}

TEST_CASE("inserting a negation flips every scored aspect") {
    const auto lex = fixture_lexicon();
    std::mt19937 rng(77);
    const std::vector<std::string> fillers = {"band", "song", "track", "voice"};
    const std::vector<std::string> sentiments = {"great", "good", "awful", "mediocre"};
    std::uniform_int_distribution<size_t> pick_f(0, fillers.size() - 1);
    std::uniform_int_distribution<size_t> pick_s(0, sentiments.size() - 1);
    for (int round = 0; round < 200; ++round) {
        // noun + one sentiment word, no negation
        TaggedSentence plain = tagged({{fillers[pick_f(rng)], Pos::Noun},
                                       {"is", Pos::Verb},
                                       {sentiments[pick_s(rng)], Pos::Adjective}});
        AspectCandidate c;
        c.aspect = plain.tokens[0].word;
        c.kind = AspectKind::SingleNoun;
        c.head = 0;
        const auto base = score_aspect(plain, c, lex);
        REQUIRE(base.score.has_value());

        TaggedSentence negated = plain;
        negated.tokens.insert(negated.tokens.begin() + 2, {"not", Pos::Other});
        AspectCandidate c2 = c;  // head unchanged: insertion after the head
        const auto flipped = score_aspect(negated, c2, lex);
        REQUIRE(flipped.score.has_value());
        CHECK(*flipped.score == doctest::Approx(-*base.score));
        CHECK(flipped.negated != base.negated);
    }
}

TEST_CASE("every emitted score respects the lexicon bounds") {
    const auto lex = fixture_lexicon();
    double max_abs = 0.0;
    for (const auto& [w, p] : lex.entries) max_abs = std::max(max_abs, std::abs(p));
    std::mt19937 rng(20240815);
    const std::vector<std::pair<std::string, Pos>> pool = {
        {"band", Pos::Noun},      {"song", Pos::Noun},   {"is", Pos::Verb},
        {"great", Pos::Adjective}, {"awful", Pos::Adjective}, {"not", Pos::Other},
        {"the", Pos::Other},      {"chorus", Pos::Noun}, {"lovely", Pos::Adjective},
        {"sounded", Pos::Verb},   {"never", Pos::Other}};
    std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
    std::uniform_int_distribution<int> len(1, 12);
    for (int round = 0; round < 1000; ++round) {
        TaggedSentence s;
        const int n = len(rng);
        for (int i = 0; i < n; ++i) {
            const auto& [w, p] = pool[pick(rng)];
            s.tokens.push_back({w, p});
        }
        for (const auto& c : extract_aspects(s, lex)) {
            const auto op = score_aspect(s, c, lex);
            CHECK(op.score.has_value() == op.sentiment_word.has_value());
            if (op.score) {
                CHECK(std::abs(*op.score) <= max_abs + 1e-12);
                CHECK(*op.score >= -1.0);
                CHECK(*op.score <= 1.0);
            }
        }
    }
}

TEST_CASE("removing the lexicon neutralizes everything") {
    const auto lex = fixture_lexicon();
    SentimentLexicon empty;
    const auto s = tagged({{"great", Pos::Adjective},
                           {"album", Pos::Noun},
                           {"awful", Pos::Adjective}});
    AspectCandidate c;
    c.aspect = "album";
    c.head = 1;
    CHECK(score_aspect(s, c, lex).score.has_value());
    CHECK(!score_aspect(s, c, empty).score.has_value());
}

TEST_CASE("noun usage counts sentences, not tokens") {
    const auto lex = fixture_lexicon();
    RulePosTagger tagger;
    const auto sents = tag_sentences(
        "The guitar is great. The guitar and the guitar again. Drums thump.", tagger);
    const auto usage = count_noun_usage(sents, lex);
    REQUIRE(usage.count("guitar") == 1);
    CHECK(usage.at("guitar").occurrences == 2);       // distinct per sentence
    CHECK(usage.at("guitar").with_sentiment == 1);
}

TEST_CASE("single-noun validation applies ratio and support") {
    std::map<std::string, NounUsage> usage;
    usage["melody"] = {10, 8};   // 0.8 >= 0.3, support ok
    usage["cover"] = {5, 0};     // never with sentiment
    usage["sleeve"] = {1, 1};    // support below 2
    usage["mix"] = {10, 3};      // exactly 0.3
    const auto kept = validate_single_nouns(usage, 0.3, 2);
    CHECK(kept.count("melody") == 1);
    CHECK(kept.count("mix") == 1);
    CHECK(kept.count("cover") == 0);
    CHECK(kept.count("sleeve") == 0);

    CHECK_THROWS_AS(validate_single_nouns(usage, -0.1, 2), ConfigError);
    CHECK_THROWS_AS(validate_single_nouns(usage, 1.5, 2), ConfigError);
    CHECK_THROWS_AS(validate_single_nouns(usage, 0.3, -1), ConfigError);
}

TEST_CASE("review score averages the non-neutral opinions") {
    auto op = [](std::optional<double> s) {
        AspectOpinion o;
        o.aspect = "x";
        if (s) {
            o.score = s;
            o.sentiment_word = "w";
        }
        return o;
    };
    CHECK(review_score({op(0.5), op(-0.25), op(0.5)}) == doctest::Approx(0.25));
    CHECK(review_score({op(std::nullopt), op(std::nullopt)}) == doctest::Approx(0.0));
    CHECK(review_score({op(0.21)}) == doctest::Approx(0.21));
    CHECK(review_score({op(0.5), op(std::nullopt)}) == doctest::Approx(0.5));
    CHECK(review_score({}) == doctest::Approx(0.0));
}

TEST_CASE("corpus analysis filters unvalidated nouns and parallel matches serial") {
    const auto lex = fixture_lexicon();
    RulePosTagger tagger;
    std::vector<Document> docs;
    // "guitar" recurs with sentiment; "yesterday" appears once without.
    docs.push_back(review_doc("r1", "The guitar is great. The guitar is good."));
    docs.push_back(review_doc("r2", "The guitar is awful. The album arrived yesterday."));
    docs.push_back(review_doc("r3", "Not a good album. Great chorus arrangement."));

    const auto par = analyze_corpus(docs, lex, tagger);
    const auto ser = analyze_corpus_serial(docs, lex, tagger);
    REQUIRE(par.size() == docs.size());
    REQUIRE(ser.size() == docs.size());
    for (size_t i = 0; i < par.size(); ++i) {
        CHECK(par[i].doc_id == ser[i].doc_id);
        CHECK(par[i].score == doctest::Approx(ser[i].score).epsilon(1e-15));
        REQUIRE(par[i].opinions.size() == ser[i].opinions.size());
        for (size_t j = 0; j < par[i].opinions.size(); ++j) {
            CHECK(par[i].opinions[j].aspect == ser[i].opinions[j].aspect);
            CHECK(par[i].opinions[j].kind == ser[i].opinions[j].kind);
            CHECK(par[i].opinions[j].negated == ser[i].opinions[j].negated);
            CHECK(par[i].opinions[j].score.has_value() ==
                  ser[i].opinions[j].score.has_value());
        }
    }

    // guitar: 3 sentences, 3 with sentiment -> retained
    bool saw_guitar = false, saw_yesterday = false;
    for (const auto& r : par)
        for (const auto& op : r.opinions) {
            if (op.aspect == "guitar") saw_guitar = true;
            if (op.aspect == "yesterday") saw_yesterday = true;
        }
    CHECK(saw_guitar);
    CHECK(!saw_yesterday);  // one occurrence, below min_support

    // r3: "album" negated to -0.6; "great" is a lexicon adjective so it
    // cannot start a bigram, leaving the noun-noun "chorus arrangement".
    const auto& r3 = par[2];
    bool saw_album = false, saw_bigram = false;
    for (const auto& op : r3.opinions) {
        if (op.aspect == "album") {
            saw_album = true;
            CHECK(op.negated);
            CHECK(*op.score == doctest::Approx(-0.6));
        }
        if (op.kind == AspectKind::Bigram) {
            saw_bigram = true;
            CHECK(op.aspect == "chorus arrangement");
        }
    }
    CHECK(saw_album);
    CHECK(saw_bigram);
}

TEST_CASE("kind and pos names render stably") {
    CHECK(to_string(AspectKind::Bigram) == "bigram");
    CHECK(to_string(AspectKind::SingleNoun) == "single_noun");
    CHECK(to_string(Pos::Noun) == "noun");
    CHECK(to_string(Pos::Adjective) == "adjective");
    CHECK(to_string(Pos::Verb) == "verb");
    CHECK(to_string(Pos::Other) == "other");
}
