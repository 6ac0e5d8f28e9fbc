// bench: serial-vs-parallel timing for the three OpenMP kernels, on
// synthetic workloads sized by --scale. Each pair's outputs are compared so
// the table doubles as an equivalence check: the parallel kernels must
// reproduce the serial reference exactly.
#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>

#include "musekb/corpus.hpp"
#include "musekb/linking.hpp"
#include "musekb/resolution.hpp"
#include "musekb/sentiment.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double best_ms(int repeats, const std::function<void()>& fn) {
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        auto t0 = Clock::now();
        fn();
        auto t1 = Clock::now();
        best = std::min(best,
                        std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

std::string make_name(std::mt19937& rng) {
    static const char* syllables[] = {"an", "to", "ni", "ca", "mar", "che",
                                      "lu", "pe", "ro", "sa", "vi", "do",
                                      "ra", "mi", "ne", "ta", "el", "go"};
    std::uniform_int_distribution<size_t> pick(0, std::size(syllables) - 1);
    std::uniform_int_distribution<int> len(2, 4);
    auto word = [&] {
        std::string w;
        int n = len(rng);
        for (int i = 0; i < n; ++i) w += syllables[pick(rng)];
        w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
        return w;
    };
    return word() + " " + word();
}

std::vector<musekb::EntityRecord> make_entities(size_t n, unsigned seed,
                                                const std::string& prefix) {
    std::mt19937 rng(seed);
    std::vector<musekb::EntityRecord> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        musekb::EntityRecord e;
        e.id = prefix + std::to_string(i);
        e.label = make_name(rng);
        e.category = i % 4 == 0 ? musekb::Category::Location
                                : musekb::Category::Person;
        if (i % 3 == 0) e.aliases.push_back(e.label + " Jr");
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<musekb::Document> make_mention_docs(
    size_t n, const std::vector<musekb::EntityRecord>& entities, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<size_t> pick(0, entities.size() - 1);
    static const char* fillers[] = {"sang in the theatre", "recorded a cycle",
                                    "toured the province", "wrote a mass",
                                    "joined the chapel choir"};
    std::uniform_int_distribution<size_t> fill(0, std::size(fillers) - 1);
    std::vector<musekb::Document> docs;
    docs.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        musekb::Document d;
        d.id = "doc" + std::to_string(i);
        d.doc_type = musekb::DocType::Biography;
        std::string text;
        for (int s = 0; s < 6; ++s) {
            text += entities[pick(rng)].label;
            text += ' ';
            text += fillers[fill(rng)];
            text += " near ";
            text += entities[pick(rng)].label;
            text += ". ";
        }
        d.text = std::move(text);
        docs.push_back(std::move(d));
    }
    return docs;
}

musekb::SentimentLexicon make_lexicon() {
    musekb::SentimentLexicon lex;
    const std::pair<const char*, double> words[] = {
        {"excellent", 0.9}, {"great", 0.75}, {"good", 0.6},   {"warm", 0.5},
        {"fresh", 0.45},    {"solid", 0.4},  {"dull", -0.5},  {"boring", -0.6},
        {"awful", -0.8},    {"weak", -0.45}, {"tired", -0.4}, {"flat", -0.35},
    };
    for (const auto& [w, p] : words) lex.entries[w] = p;
    lex.negations = {"not", "never", "no", "hardly"};
    return lex;
}

std::vector<musekb::Document> make_review_docs(size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    static const char* nouns[] = {"guitar",  "chorus", "rhythm", "voice",
                                  "melody",  "bass",   "album",  "verse",
                                  "tempo",   "mix"};
    static const char* adjectives[] = {"excellent", "great", "good",  "warm",
                                       "fresh",     "solid", "dull",  "boring",
                                       "awful",     "weak",  "tired", "flat"};
    std::uniform_int_distribution<size_t> pn(0, std::size(nouns) - 1);
    std::uniform_int_distribution<size_t> pa(0, std::size(adjectives) - 1);
    std::uniform_int_distribution<int> neg(0, 9);
    std::vector<musekb::Document> docs;
    docs.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        musekb::Document d;
        d.id = "rev" + std::to_string(i);
        d.doc_type = musekb::DocType::Review;
        std::string text;
        for (int s = 0; s < 5; ++s) {
            text += "The ";
            text += nouns[pn(rng)];
            text += ' ';
            text += nouns[pn(rng)];
            text += neg(rng) == 0 ? " is not " : " is ";
            text += adjectives[pa(rng)];
            text += ". ";
        }
        d.text = std::move(text);
        docs.push_back(std::move(d));
    }
    return docs;
}

bool same_annotations(const std::vector<std::vector<musekb::Annotation>>& a,
                      const std::vector<std::vector<musekb::Annotation>>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != b[i].size()) return false;
        for (size_t j = 0; j < a[i].size(); ++j) {
            const auto& x = a[i][j];
            const auto& y = b[i][j];
            if (x.span.start != y.span.start || x.span.end != y.span.end ||
                x.span.surface != y.span.surface || x.entity_id != y.entity_id ||
                x.category != y.category)
                return false;
        }
    }
    return true;
}

bool same_analyses(const std::vector<musekb::ReviewAnalysis>& a,
                   const std::vector<musekb::ReviewAnalysis>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].doc_id != b[i].doc_id || a[i].score != b[i].score ||
            a[i].opinions.size() != b[i].opinions.size())
            return false;
        for (size_t j = 0; j < a[i].opinions.size(); ++j) {
            const auto& x = a[i].opinions[j];
            const auto& y = b[i].opinions[j];
            if (x.aspect != y.aspect || x.kind != y.kind ||
                x.sentiment_word != y.sentiment_word || x.score != y.score ||
                x.negated != y.negated || x.sentence_index != y.sentence_index)
                return false;
        }
    }
    return true;
}

void print_row(const char* kernel, size_t n, double serial_ms,
               double parallel_ms, bool match) {
    std::printf("%-18s %10zu %12.1f %12.1f %9.2fx   %s\n", kernel, n, serial_ms,
                parallel_ms, serial_ms / parallel_ms, match ? "match" : "DIFF");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bench: serial vs OpenMP kernel timing"};
    int scale = 1;
    int jobs = 0;
    int repeats = 3;
    app.add_option("--scale", scale, "workload size multiplier")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--jobs", jobs, "worker threads (0 = hardware)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    app.add_option("--repeats", repeats, "timed repeats, best kept")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    if (jobs > 0) omp_set_num_threads(jobs);
    std::printf("threads: %d, scale: %d, repeats: %d\n", omp_get_max_threads(),
                scale, repeats);
    std::printf("%-18s %10s %12s %12s %10s   %s\n", "kernel", "n", "serial ms",
                "parallel ms", "speedup", "outputs");

    {
        auto a = make_entities(600 * static_cast<size_t>(scale), 11, "a");
        auto b = make_entities(600 * static_cast<size_t>(scale), 22, "b");
        musekb::ResolutionConfig cfg;
        cfg.theta = 0.75;
        std::vector<musekb::ScoredPair> rs, rp;
        double ts = best_ms(repeats,
                            [&] { rs = musekb::score_candidates_serial(a, b, cfg); });
        double tp =
            best_ms(repeats, [&] { rp = musekb::score_candidates(a, b, cfg); });
        bool match = rs.size() == rp.size();
        for (size_t i = 0; match && i < rs.size(); ++i)
            match = rs[i].a_id == rp[i].a_id && rs[i].b_id == rp[i].b_id &&
                    rs[i].score == rp[i].score;
        print_row("score_candidates", a.size() * b.size(), ts, tp, match);
    }

    {
        auto entities = make_entities(400, 33, "e");
        auto docs =
            make_mention_docs(800 * static_cast<size_t>(scale), entities, 44);
        auto gazetteer = musekb::Gazetteer::build(entities);
        musekb::RuleTagger tagger;
        std::vector<std::vector<musekb::Annotation>> ls, lp;
        double ts = best_ms(repeats, [&] {
            ls = musekb::link_corpus_serial(
                docs, gazetteer, musekb::LinkStrategy::NerLocationOnly, &tagger);
        });
        double tp = best_ms(repeats, [&] {
            lp = musekb::link_corpus(
                docs, gazetteer, musekb::LinkStrategy::NerLocationOnly, &tagger);
        });
        print_row("link_corpus", docs.size(), ts, tp, same_annotations(ls, lp));
    }

    {
        auto docs = make_review_docs(1200 * static_cast<size_t>(scale), 55);
        auto lexicon = make_lexicon();
        musekb::RulePosTagger tagger;
        musekb::SentimentConfig cfg;
        std::vector<musekb::ReviewAnalysis> ss, sp;
        double ts = best_ms(repeats, [&] {
            ss = musekb::analyze_corpus_serial(docs, lexicon, tagger, cfg);
        });
        double tp = best_ms(
            repeats, [&] { sp = musekb::analyze_corpus(docs, lexicon, tagger, cfg); });
        print_row("analyze_corpus", docs.size(), ts, tp, same_analyses(ss, sp));
    }
    return 0;
}
