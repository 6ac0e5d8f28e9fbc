#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <string>

#include "musekb/textmine.hpp"

using namespace musekb;

namespace {

Document grouped(const std::string& id, const std::string& text,
                 const std::string& group) {
    Document d;
    d.id = id;
    d.title = id;
    d.text = text;
    d.language = Language::En;
    d.doc_type = DocType::GenreDescription;
    d.source = "fixture";
    if (!group.empty()) d.group = group;
    return d;
}

} // namespace

TEST_CASE("frequencies, hand-counted") {
    const auto t =
        term_frequencies({grouped("d1", "madrigal madrigal motet", "g")}, {}, 3);
    CHECK(t.group == "g");
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0].term == "madrigal");
    CHECK(t.rows[0].count == 2);
    CHECK(t.rows[0].weight == doctest::Approx(1.0));
    CHECK(t.rows[1].term == "motet");
    CHECK(t.rows[1].count == 1);
    CHECK(t.rows[1].weight == doctest::Approx(0.5));
}

TEST_CASE("stopwords are removed after folding") {
    const auto t = term_frequencies({grouped("d1", "madrigal madrigal Motet", "g")},
                                    {"motet"}, 3);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].term == "madrigal");
}

TEST_CASE("case folds to a single term") {
    const auto t = term_frequencies({grouped("d1", "Motet motet MOTET", "g")}, {}, 3);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].term == "motet");
    CHECK(t.rows[0].count == 3);
}

TEST_CASE("digit-bearing tokens and short tokens are dropped") {
    const auto t =
        term_frequencies({grouped("d1", "opus 1594 op4 viol da gamba", "g")}, {}, 3);
    std::vector<std::string> terms;
    for (const auto& r : t.rows) terms.push_back(r.term);
    CHECK(std::find(terms.begin(), terms.end(), "1594") == terms.end());
    CHECK(std::find(terms.begin(), terms.end(), "op4") == terms.end());
    CHECK(std::find(terms.begin(), terms.end(), "da") == terms.end());  // min_len
    CHECK(std::find(terms.begin(), terms.end(), "opus") != terms.end());
    CHECK(std::find(terms.begin(), terms.end(), "viol") != terms.end());
    CHECK(std::find(terms.begin(), terms.end(), "gamba") != terms.end());
}

TEST_CASE("min_len counts codepoints") {
    // "aña" is three codepoints but four bytes; byte-counting would keep it
    // at min_len 4.
    const auto t = term_frequencies({grouped("d1", "aña casa", "g")}, {}, 4);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].term == "casa");
}

TEST_CASE("empty group yields an empty table") {
    const auto t = term_frequencies({}, {}, 3);
    CHECK(t.rows.empty());
    const auto e = term_frequencies({grouped("d1", "the of and", "g")}, {"the", "of", "and"}, 1);
    CHECK(e.rows.empty());
}

TEST_CASE("mixed groups are rejected") {
    CHECK_THROWS_AS(term_frequencies({grouped("d1", "x y", "g1"),
                                      grouped("d2", "x y", "g2")},
                                     {}, 1),
                    ValidationError);
}

TEST_CASE("ties sort by term ascending") {
    const auto t = term_frequencies({grouped("d1", "viola cello viola cello", "g")}, {}, 3);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0].term == "cello");
    CHECK(t.rows[1].term == "viola");
    CHECK(t.rows[0].weight == doctest::Approx(1.0));
    CHECK(t.rows[1].weight == doctest::Approx(1.0));
}

TEST_CASE("conservation and top-weight invariants on random corpora") {
    std::mt19937 rng(2024);
    const std::vector<std::string> vocab = {"madrigal", "motet",  "chanson",
                                            "mass",     "psalm",  "hymn",
                                            "canzona",  "ricercar"};
    std::uniform_int_distribution<size_t> pick(0, vocab.size() - 1);
    std::uniform_int_distribution<int> words(1, 60);
    for (int round = 0; round < 30; ++round) {
        std::string text;
        long total = 0;
        const int n = words(rng);
        for (int i = 0; i < n; ++i) {
            text += vocab[pick(rng)];
            text += ' ';
            ++total;
        }
        const auto t = term_frequencies({grouped("d", text, "g")}, {}, 3);
        long sum = 0;
        for (const auto& r : t.rows) sum += r.count;
        CHECK(sum == total);
        REQUIRE(!t.rows.empty());
        CHECK(t.rows[0].weight == doctest::Approx(1.0));
        for (const auto& r : t.rows) {
            CHECK(r.weight > 0.0);
            CHECK(r.weight <= 1.0);
        }
    }
}

TEST_CASE("document order within a group does not matter") {
    const auto a = term_frequencies(
        {grouped("d1", "madrigal motet", "g"), grouped("d2", "madrigal mass", "g")},
        {}, 3);
    const auto b = term_frequencies(
        {grouped("d2", "madrigal mass", "g"), grouped("d1", "madrigal motet", "g")},
        {}, 3);
    REQUIRE(a.rows.size() == b.rows.size());
    for (size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].term == b.rows[i].term);
        CHECK(a.rows[i].count == b.rows[i].count);
    }
}

TEST_CASE("group_compare splits by the group field") {
    const std::vector<Document> docs = {
        grouped("d1", "chanson chanson pavane", "french"),
        grouped("d2", "madrigal madrigal motet", "italian"),
        grouped("d3", "chanson air", "french"),
    };
    const auto tables = group_compare(docs, "group", {}, 3);
    REQUIRE(tables.size() == 2);
    REQUIRE(tables.count("french") == 1);
    REQUIRE(tables.count("italian") == 1);
    CHECK(tables.at("french").rows[0].term == "chanson");
    CHECK(tables.at("french").rows[0].count == 3);
    CHECK(tables.at("french").rows[0].weight == doctest::Approx(1.0));
    CHECK(tables.at("italian").rows[0].term == "madrigal");
}

TEST_CASE("single group matches term_frequencies") {
    const std::vector<Document> docs = {grouped("d1", "madrigal motet", "g")};
    const auto tables = group_compare(docs, "group", {}, 3);
    const auto direct = term_frequencies(docs, {}, 3);
    REQUIRE(tables.size() == 1);
    const auto& t = tables.begin()->second;
    REQUIRE(t.rows.size() == direct.rows.size());
    for (size_t i = 0; i < t.rows.size(); ++i) {
        CHECK(t.rows[i].term == direct.rows[i].term);
        CHECK(t.rows[i].count == direct.rows[i].count);
    }
}

TEST_CASE("missing group values are reported with doc ids") {
    const std::vector<Document> docs = {grouped("d1", "x", "g"),
                                        grouped("d2", "y", ""),
                                        grouped("d3", "z", "")};
    try {
        group_compare(docs, "group", {}, 1);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("d2") != std::string::npos);
        CHECK(msg.find("d3") != std::string::npos);
        CHECK(msg.find("d1") == std::string::npos);
    }
}

TEST_CASE("wordlists load folded with comments stripped") {
    const std::string path = "/tmp/musekb_words_test.txt";
    {
        std::ofstream out(path);
        out << "# comment line\n"
            << "The\n"
            << "  el \n"
            << "\n"
            << "canción\n";
    }
    const auto words = load_wordlist(path);
    CHECK(words.count("the") == 1);
    CHECK(words.count("el") == 1);
    CHECK(words.count("canción") == 1);  // accents preserved
    CHECK(words.count("# comment line") == 0);
    std::remove(path.c_str());
}
