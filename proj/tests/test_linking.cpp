#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "musekb/linking.hpp"

using namespace musekb;

namespace {

EntityRecord entity(const std::string& id, const std::string& label, Category cat,
                    std::vector<std::string> aliases = {}) {
    EntityRecord e;
    e.id = id;
    e.label = label;
    e.category = cat;
    e.aliases = std::move(aliases);
    return e;
}

// The town-as-surname corpus: the artist's nickname IS a town name.
std::vector<EntityRecord> town_surname_entities() {
    return {
        entity("P_utrera", "Niño de Utrera", Category::Person, {"Utrera"}),
        entity("L_utrera", "Utrera", Category::Location),
        entity("L_sevilla", "Sevilla", Category::Location),
        entity("P_sabicas", "Sabicas", Category::Person),
    };
}

} // namespace

TEST_CASE("candidates found for exact phrases, verified against brute force") {
    const auto gaz = Gazetteer::build(
        {entity("P1", "Camarón de la Isla", Category::Person),
         entity("L1", "San Fernando", Category::Location)});
    const std::string text = "Camarón de la Isla nació en San Fernando";
    const auto spans = gaz.detect_candidates(text);
    REQUIRE(spans.size() == 2);
    CHECK(spans[0].surface == "Camarón de la Isla");
    CHECK(spans[0].start == text.find("Camarón"));
    CHECK(spans[1].surface == "San Fernando");
    CHECK(spans[1].start == text.find("San Fernando"));
    CHECK(text.substr(spans[1].start, spans[1].end - spans[1].start) == "San Fernando");
}

TEST_CASE("empty gazetteer finds nothing") {
    const Gazetteer gaz = Gazetteer::build({});
    CHECK(gaz.empty());
    CHECK(gaz.detect_candidates("Camarón cantó en Sevilla").empty());
}

TEST_CASE("longest match wins over a contained shorter match") {
    const auto gaz = Gazetteer::build(
        {entity("P1", "Camarón de la Isla", Category::Person),
         entity("L1", "Isla", Category::Location)});
    const std::string text = "Camarón de la Isla";
    const auto spans = gaz.detect_candidates(text);
    REQUIRE(spans.size() == 1);
    CHECK(spans[0].surface == "Camarón de la Isla");
}

TEST_CASE("matches align to token boundaries") {
    const auto gaz = Gazetteer::build({entity("L1", "Isla", Category::Location)});
    // "Islandia" contains "Isla" as a prefix but not as a whole token.
    CHECK(gaz.detect_candidates("viajó a Islandia").empty());
    const auto spans = gaz.detect_candidates("la Isla es bonita");
    REQUIRE(spans.size() == 1);
    CHECK(spans[0].surface == "Isla");
}

TEST_CASE("matching is diacritic- and case-insensitive") {
    const auto gaz = Gazetteer::build({entity("L1", "Cádiz", Category::Location)});
    const auto spans = gaz.detect_candidates("vive en CADIZ desde 1920");
    REQUIRE(spans.size() == 1);
    CHECK(spans[0].surface == "CADIZ");
}

TEST_CASE("strategies on the town-as-surname fixture") {
    const auto gaz = Gazetteer::build(town_surname_entities());
    const std::string text =
        "Niño de Utrera nació en Sevilla en 1908. Utrera grabó muchos discos "
        "con Sabicas.";
    const RuleTagger tagger;

    SUBCASE("spans-only takes the spurious Location reading") {
        const auto anns = link(text, gaz, LinkStrategy::SpansOnly, nullptr);
        REQUIRE(anns.size() == 4);
        CHECK(anns[0].entity_id == "P_utrera");  // longest match wins up front
        CHECK(anns[1].entity_id == "L_sevilla");
        // Ambiguous standalone "Utrera": Location outranks Person here.
        CHECK(anns[2].entity_id == "L_utrera");
        CHECK(anns[2].category == Category::Location);
        CHECK(anns[3].entity_id == "P_sabicas");
    }

    SUBCASE("location gating recovers the Person reading") {
        const auto anns = link(text, gaz, LinkStrategy::NerLocationOnly, &tagger);
        REQUIRE(anns.size() == 4);
        CHECK(anns[0].entity_id == "P_utrera");
        CHECK(anns[1].entity_id == "L_sevilla");  // tagger saw "en Sevilla"
        // Tagger proposes no Location at the second "Utrera", so the
        // Location reading is gated away and the Person alias wins.
        CHECK(anns[2].entity_id == "P_utrera");
        CHECK(anns[2].category == Category::Person);
        CHECK(anns[3].entity_id == "P_sabicas");
    }

    SUBCASE("person gating loses ungated persons") {
        const auto anns = link(text, gaz, LinkStrategy::NerPersonAndLocation, &tagger);
        // "Niño de Utrera" breaks on lowercase "de" for the person marker
        // rule and "Sabicas" has no marker, so person annotations vanish;
        // only the tagged Location "Sevilla" survives.
        REQUIRE(anns.size() == 1);
        CHECK(anns[0].entity_id == "L_sevilla");
    }
}

TEST_CASE("NER strategies demand a tagger") {
    const auto gaz = Gazetteer::build(town_surname_entities());
    CHECK_THROWS_AS(link("x", gaz, LinkStrategy::NerLocationOnly, nullptr), ConfigError);
    CHECK_THROWS_AS(link("x", gaz, LinkStrategy::NerPersonAndLocation, nullptr),
                    ConfigError);
    CHECK_NOTHROW(link("x", gaz, LinkStrategy::SpansOnly, nullptr));
}

TEST_CASE("no gazetteer matches yields empty annotations under all strategies") {
    const auto gaz = Gazetteer::build({entity("L1", "Granada", Category::Location)});
    const RuleTagger tagger;
    const std::string text = "Nothing matches here.";
    CHECK(link(text, gaz, LinkStrategy::SpansOnly, nullptr).empty());
    CHECK(link(text, gaz, LinkStrategy::NerLocationOnly, &tagger).empty());
    CHECK(link(text, gaz, LinkStrategy::NerPersonAndLocation, &tagger).empty());
}

TEST_CASE("rule tagger proposals") {
    const RuleTagger tagger;

    SUBCASE("locations after en/in, connectors allowed") {
        const auto spans = tagger.tag("vivió en San Fernando de Cádiz toda su vida");
        REQUIRE(spans.size() == 1);
        CHECK(spans[0].category == Category::Location);
        CHECK(spans[0].span.surface == "San Fernando de Cádiz");
    }

    SUBCASE("coordination does not merge locations") {
        const auto spans = tagger.tag("actuó en Sevilla y Madrid");
        REQUIRE(spans.size() == 1);  // only the run right after "en"
        CHECK(spans[0].span.surface == "Sevilla");
    }

    SUBCASE("person markers") {
        const auto spans = tagger.tag("con Don Antonio Chacón en Madrid");
        REQUIRE(spans.size() == 2);
        CHECK(spans[0].category == Category::Person);
        CHECK(spans[0].span.surface == "Don Antonio Chacón");
        CHECK(spans[1].category == Category::Location);
        CHECK(spans[1].span.surface == "Madrid");
    }

    SUBCASE("marker without a following capitalized token proposes nothing") {
        CHECK(tagger.tag("un don especial").empty());
        CHECK(tagger.tag("Don segundo").empty());
    }

    SUBCASE("spans are within bounds and non-overlapping") {
        const std::string text = "en Sevilla con Doña María en Cádiz";
        const auto spans = tagger.tag(text);
        size_t last_end = 0;
        for (const auto& s : spans) {
            CHECK(s.span.start >= last_end);
            CHECK(s.span.end <= text.size());
            CHECK(s.span.end > s.span.start);
            last_end = s.span.end;
        }
    }
}

TEST_CASE("annotations never overlap and stay within bounds (fuzz)") {
    const auto gaz = Gazetteer::build(town_surname_entities());
    const RuleTagger tagger;
    std::mt19937 rng(99);
    const std::vector<std::string> words = {"Niño",  "de",    "Utrera", "Sevilla",
                                            "en",    "1908",  "Sabicas", "grabó",
                                            "discos", "con",  "la",      "Isla",
                                            ".",     "y",     "cantó"};
    std::uniform_int_distribution<size_t> pick(0, words.size() - 1);
    std::uniform_int_distribution<int> len(0, 30);
    for (int round = 0; round < 150; ++round) {
        std::string text;
        const int n = len(rng);
        for (int i = 0; i < n; ++i) {
            if (!text.empty()) text += ' ';
            text += words[pick(rng)];
        }
        for (const LinkStrategy st :
             {LinkStrategy::SpansOnly, LinkStrategy::NerPersonAndLocation,
              LinkStrategy::NerLocationOnly}) {
            const auto anns = link(text, gaz, st, &tagger);
            size_t last_end = 0;
            for (const auto& a : anns) {
                CHECK(a.span.start >= last_end);
                CHECK(a.span.end <= text.size());
                CHECK(a.span.end > a.span.start);
                CHECK(text.substr(a.span.start, a.span.end - a.span.start) ==
                      a.span.surface);
                last_end = a.span.end;
            }
        }
    }
}

TEST_CASE("determinism: repeated runs give identical annotations") {
    const auto gaz = Gazetteer::build(town_surname_entities());
    const RuleTagger tagger;
    std::vector<Document> docs;
    for (int i = 0; i < 8; ++i) {
        Document d;
        d.id = "d" + std::to_string(i);
        d.title = "t";
        d.text = "Niño de Utrera nació en Sevilla. Utrera grabó con Sabicas en Utrera.";
        d.language = Language::Es;
        d.doc_type = DocType::Biography;
        d.source = "fixture";
        docs.push_back(d);
    }
    const auto a = link_corpus(docs, gaz, LinkStrategy::NerLocationOnly, &tagger);
    const auto b = link_corpus_serial(docs, gaz, LinkStrategy::NerLocationOnly, &tagger);
    REQUIRE(a.size() == b.size());
    for (size_t d = 0; d < a.size(); ++d) {
        REQUIRE(a[d].size() == b[d].size());
        for (size_t k = 0; k < a[d].size(); ++k) {
            CHECK(a[d][k].span.start == b[d][k].span.start);
            CHECK(a[d][k].span.end == b[d][k].span.end);
            CHECK(a[d][k].entity_id == b[d][k].entity_id);
        }
    }
}

TEST_CASE("evaluation is strict on spans and entity ids") {
    auto ann = [](size_t s, size_t e, const std::string& id) {
        Annotation a;
        a.span = {s, e, ""};
        a.entity_id = id;
        return a;
    };
    // 3 predictions, 2 correct, gold size 4.
    const std::vector<Annotation> predicted = {ann(0, 5, "E1"), ann(10, 15, "E2"),
                                               ann(20, 25, "E3")};
    const std::vector<Annotation> gold = {ann(0, 5, "E1"), ann(10, 15, "E2"),
                                          ann(30, 35, "E4"), ann(40, 45, "E5")};
    const PrEval e = evaluate_linking(predicted, gold);
    CHECK(e.precision == doctest::Approx(0.667).epsilon(0.001));
    CHECK(e.recall == doctest::Approx(0.5).epsilon(0.001));
    CHECK(e.f_measure == doctest::Approx(0.571).epsilon(0.001));

    // Same span, wrong id: not correct.
    const PrEval wrong = evaluate_linking({ann(0, 5, "EX")}, {ann(0, 5, "E1")});
    CHECK(wrong.precision == 0.0);

    const PrEval perfect = evaluate_linking(gold, gold);
    CHECK(perfect.precision == doctest::Approx(1.0));
    CHECK(perfect.recall == doctest::Approx(1.0));
    CHECK(perfect.f_measure == doctest::Approx(1.0));
}

TEST_CASE("per-document evaluation requires aligned lists") {
    const std::vector<std::vector<Annotation>> two(2), three(3);
    CHECK_THROWS_AS(evaluate_linking(two, three), ConfigError);
}

TEST_CASE("strategy names parse") {
    CHECK(strategy_from("spans") == LinkStrategy::SpansOnly);
    CHECK(strategy_from("ner-pl") == LinkStrategy::NerPersonAndLocation);
    CHECK(strategy_from("ner-l") == LinkStrategy::NerLocationOnly);
    CHECK_THROWS_AS(strategy_from("bogus"), ParseError);
}
