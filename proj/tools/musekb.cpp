// musekb: command-line front end composing the library into pipelines.
//
// Exit codes: 0 success, 1 data error (file/line context in the message),
// 2 usage error. Every output format is line-oriented and deterministic;
// the generated-at header is suppressed with --no-header so reruns are
// byte-identical.
#include <algorithm>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "musekb/bio.hpp"
#include "musekb/corpus.hpp"
#include "musekb/diachronic.hpp"
#include "musekb/errors.hpp"
#include "musekb/kgraph.hpp"
#include "musekb/linking.hpp"
#include "musekb/resolution.hpp"
#include "musekb/sentiment.hpp"
#include "musekb/similarity.hpp"
#include "musekb/textmine.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

int run_cli(const std::vector<std::string>& args, int depth);

// ------------------------------------------------------------ small utils

std::string iso_now() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Output sink: a file when a path is given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_)
                throw musekb::IoError("cannot open '" + path + "' for writing");
            out_ = &file_;
        }
    }
    std::ostream& out() { return *out_; }
    void finish(const std::string& path) {
        out_->flush();
        if (!*out_) throw musekb::IoError("error while writing '" + path + "'");
    }

private:
    std::ofstream file_;
    std::ostream* out_ = &std::cout;
};

using HeaderParams = std::vector<std::pair<std::string, std::string>>;

void write_header(std::ostream& out, const std::string& tool,
                  const HeaderParams& params, bool no_header) {
    if (no_header) return;
    out << "# musekb " << tool << "\n# generated " << iso_now() << "\n";
    for (const auto& [k, v] : params) out << "# " << k << ' ' << v << "\n";
}

// Tab-separated rows; blank lines and '#' comments are skipped.
std::vector<std::vector<std::string>> read_tsv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw musekb::IoError("cannot open '" + path + "' for reading");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, '\t')) cols.push_back(col);
        rows.push_back(std::move(cols));
    }
    if (in.bad()) throw musekb::IoError("error while reading '" + path + "'");
    return rows;
}

void require_cols(const std::string& path, size_t row_index,
                  const std::vector<std::string>& row, size_t n) {
    if (row.size() < n)
        throw musekb::ParseError(path + ": row " + std::to_string(row_index + 1) +
                                 ": expected " + std::to_string(n) +
                                 " tab-separated columns, got " +
                                 std::to_string(row.size()));
}

long parse_long(const std::string& path, size_t row_index, const std::string& s) {
    try {
        size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw musekb::ParseError(path + ": row " + std::to_string(row_index + 1) +
                                 ": expected an integer, got '" + s + "'");
    }
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

// doc_id -> subject entity id map (TSV: doc_id<TAB>entity_id).
std::map<std::string, std::string> read_subjects(const std::string& path) {
    std::map<std::string, std::string> m;
    auto rows = read_tsv(path);
    for (size_t i = 0; i < rows.size(); ++i) {
        require_cols(path, i, rows[i], 2);
        if (!m.emplace(rows[i][0], rows[i][1]).second)
            throw musekb::ValidationError(path + ": duplicate doc id '" +
                                          rows[i][0] + "'");
    }
    return m;
}

// Annotations in the `link` output format, grouped per doc in doc order.
std::vector<std::vector<musekb::Annotation>> read_annotations(
    const std::string& path, const std::vector<musekb::Document>& docs) {
    std::map<std::string, std::vector<musekb::Annotation>> by_doc;
    auto rows = read_tsv(path);
    for (size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].empty() && rows[i][0] == "EVAL") continue;
        require_cols(path, i, rows[i], 6);
        musekb::Annotation a;
        a.span.start = static_cast<size_t>(parse_long(path, i, rows[i][1]));
        a.span.end = static_cast<size_t>(parse_long(path, i, rows[i][2]));
        a.span.surface = rows[i][3];
        a.entity_id = rows[i][4];
        a.category = musekb::category_from(rows[i][5]);
        by_doc[rows[i][0]].push_back(std::move(a));
    }
    std::set<std::string> doc_ids;
    for (const auto& d : docs) doc_ids.insert(d.id);
    for (const auto& [id, _] : by_doc)
        if (!doc_ids.count(id))
            throw musekb::ValidationError(path + ": annotation references "
                                          "unknown doc id '" + id + "'");
    std::vector<std::vector<musekb::Annotation>> out;
    out.reserve(docs.size());
    for (const auto& d : docs) {
        auto it = by_doc.find(d.id);
        out.push_back(it == by_doc.end() ? std::vector<musekb::Annotation>{}
                                         : std::move(it->second));
    }
    return out;
}

std::string eval_row(const musekb::PrEval& ev) {
    return "EVAL\t" + fmt("%.6f", ev.precision) + '\t' + fmt("%.6f", ev.recall) +
           '\t' + fmt("%.6f", ev.f_measure);
}

// ----------------------------------------------------------- subcommands

struct Common {
    int jobs = 0;
    bool no_header = false;
};

int cmd_ingest(const std::string& docs, const std::string& entities,
               const std::string& reviews, const std::string& albums,
               const std::string& records) {
    bool any = false;
    if (!docs.empty()) {
        std::cout << "documents " << docs << ": "
                  << musekb::load_documents(docs).size() << " records\n";
        any = true;
    }
    if (!entities.empty()) {
        std::cout << "entities " << entities << ": "
                  << musekb::load_entities(entities).size() << " records\n";
        any = true;
    }
    if (!reviews.empty()) {
        std::cout << "reviews " << reviews << ": "
                  << musekb::load_reviews(reviews).size() << " records\n";
        any = true;
    }
    if (!albums.empty()) {
        std::cout << "albums " << albums << ": "
                  << musekb::load_albums(albums).size() << " records\n";
        any = true;
    }
    if (!records.empty()) {
        std::cout << "vitals " << records << ": "
                  << musekb::load_vitals(records).size() << " records\n";
        any = true;
    }
    (void)any;  // at least one input is enforced at parse time
    return 0;
}

struct ResolveOpts {
    std::string a, b, gold, sweep, out;
    double theta = 0.9;
};

std::vector<std::pair<std::string, std::string>> read_gold_pairs(
    const std::string& path) {
    std::vector<std::pair<std::string, std::string>> gold;
    auto rows = read_tsv(path);
    for (size_t i = 0; i < rows.size(); ++i) {
        require_cols(path, i, rows[i], 2);
        gold.emplace_back(rows[i][0], rows[i][1]);
    }
    return gold;
}

int cmd_resolve(const ResolveOpts& o, const Common& c) {
    auto a = musekb::load_entities(o.a);
    auto b = musekb::load_entities(o.b);
    musekb::ResolutionConfig cfg;
    cfg.theta = o.theta;

    Sink sink(o.out);
    write_header(sink.out(), "resolve",
                 {{"a", o.a}, {"b", o.b}, {"theta", fmt("%.6f", o.theta)}},
                 c.no_header);

    if (!o.sweep.empty()) {
        double lo = 0, step = 0, hi = 0;
        char colon1 = 0, colon2 = 0;
        std::istringstream ss(o.sweep);
        ss >> lo >> colon1 >> step >> colon2 >> hi;
        if (!ss || colon1 != ':' || colon2 != ':' || step <= 0 || lo > hi ||
            lo < 0 || hi > 1) {
            std::cerr << "musekb: --sweep expects lo:step:hi within [0,1], got '"
                      << o.sweep << "'\n";
            return 2;
        }
        std::vector<double> thetas;
        for (double t = lo; t <= hi + 1e-12; t += step)
            thetas.push_back(std::min(t, 1.0));
        auto gold = read_gold_pairs(o.gold);
        for (const auto& row :
             musekb::sweep_threshold(a, b, gold, thetas, cfg.normalize))
            sink.out() << "SWEEP\t" << fmt("%.6f", row.theta) << '\t'
                       << fmt("%.6f", row.eval.precision) << '\t'
                       << fmt("%.6f", row.eval.recall) << '\t'
                       << fmt("%.6f", row.eval.f_measure) << '\n';
        sink.finish(o.out);
        return 0;
    }

    auto mapping = musekb::resolve(a, b, cfg);
    for (const auto& p : mapping.pairs)
        sink.out() << p.a_id << '\t' << p.b_id << '\t' << fmt("%.6f", p.score)
                   << '\n';
    if (!o.gold.empty())
        sink.out() << eval_row(musekb::evaluate_mapping(
                          mapping, read_gold_pairs(o.gold)))
                   << '\n';
    sink.finish(o.out);
    return 0;
}

struct LinkOpts {
    std::string docs, entities, strategy = "spans", gold, out;
    bool serial = false;
};

int cmd_link(const LinkOpts& o, const Common& c) {
    auto docs = musekb::load_documents(o.docs);
    auto entities = musekb::load_entities(o.entities);
    auto gazetteer = musekb::Gazetteer::build(entities);
    auto strategy = musekb::strategy_from(o.strategy);
    musekb::RuleTagger tagger;
    auto annotations =
        o.serial ? musekb::link_corpus_serial(docs, gazetteer, strategy, &tagger)
                 : musekb::link_corpus(docs, gazetteer, strategy, &tagger);

    Sink sink(o.out);
    write_header(sink.out(), "link",
                 {{"docs", o.docs}, {"entities", o.entities},
                  {"strategy", o.strategy}},
                 c.no_header);
    for (size_t i = 0; i < docs.size(); ++i)
        for (const auto& a : annotations[i])
            sink.out() << docs[i].id << '\t' << a.span.start << '\t' << a.span.end
                       << '\t' << a.span.surface << '\t' << a.entity_id << '\t'
                       << musekb::to_string(a.category) << '\n';
    if (!o.gold.empty()) {
        std::map<std::string, std::vector<musekb::Annotation>> gold_by_doc;
        auto rows = read_tsv(o.gold);
        for (size_t i = 0; i < rows.size(); ++i) {
            require_cols(o.gold, i, rows[i], 6);
            musekb::Annotation a;
            a.span.start = static_cast<size_t>(parse_long(o.gold, i, rows[i][1]));
            a.span.end = static_cast<size_t>(parse_long(o.gold, i, rows[i][2]));
            a.span.surface = rows[i][3];
            a.entity_id = rows[i][4];
            a.category = musekb::category_from(rows[i][5]);
            gold_by_doc[rows[i][0]].push_back(std::move(a));
        }
        std::vector<std::vector<musekb::Annotation>> gold;
        gold.reserve(docs.size());
        for (const auto& d : docs) gold.push_back(gold_by_doc[d.id]);
        sink.out() << eval_row(musekb::evaluate_linking(annotations, gold)) << '\n';
    }
    sink.finish(o.out);
    return 0;
}

struct BioOpts {
    std::string docs, entities, pattern = "trigger", subjects, gold, out;
};

int cmd_extract_bio(const BioOpts& o, const Common& c) {
    (void)c;
    auto docs = musekb::load_documents(o.docs);
    auto entities = musekb::load_entities(o.entities);
    auto gazetteer = musekb::Gazetteer::build(entities);
    musekb::RuleTagger tagger;
    std::map<std::string, std::string> subjects;
    if (!o.subjects.empty()) subjects = read_subjects(o.subjects);

    std::vector<musekb::VitalRecord> records;
    for (const auto& d : docs) {
        auto it = subjects.find(d.id);
        const std::string& subject = it == subjects.end() ? d.id : it->second;
        musekb::VitalRecord r =
            o.pattern == "trigger"
                ? musekb::extract_birth_trigger(d, subject, gazetteer, tagger)
                : musekb::extract_parenthetical(d, subject, gazetteer);
        if (r.birth_place || r.birth_year || r.death_place || r.death_year)
            records.push_back(std::move(r));
    }

    Sink sink(o.out);
    for (const auto& r : records) sink.out() << musekb::to_jsonl(r) << '\n';
    sink.finish(o.out);

    if (!o.gold.empty()) {
        auto ev = musekb::evaluate_vitals(records, musekb::load_vitals(o.gold));
        std::cout << "eval precision=" << fmt("%.6f", ev.precision)
                  << " recall=" << fmt("%.6f", ev.recall)
                  << " f_measure=" << fmt("%.6f", ev.f_measure) << '\n';
    }
    return 0;
}

struct DemographyOpts {
    std::string records, table = "flow", entities, sort = "births";
    std::string field = "birth_year", bin = "decade", out;
    long min_deaths = 1;
};

int cmd_demography(const DemographyOpts& o, const Common& c) {
    auto records = musekb::load_vitals(o.records);
    std::map<std::string, std::string> labels, provinces;
    if (!o.entities.empty()) {
        for (const auto& e : musekb::load_entities(o.entities)) {
            labels[e.id] = e.label;
            auto it = e.attributes.find("province");
            if (it != e.attributes.end()) provinces[e.id] = it->second;
        }
    }

    Sink sink(o.out);
    write_header(sink.out(), "demography",
                 {{"records", o.records}, {"table", o.table}}, c.no_header);
    if (o.table == "flow") {
        auto sort = o.sort == "deaths" ? musekb::FlowSort::Deaths
                                       : musekb::FlowSort::Births;
        sink.out() << "city,births,deaths,difference_pct\n";
        for (const auto& row : musekb::city_flow(records, labels, sort)) {
            sink.out() << csv_escape(row.city) << ',' << row.births << ','
                       << row.deaths << ',';
            if (row.difference_pct) sink.out() << *row.difference_pct;
            sink.out() << '\n';
        }
    } else if (o.table == "median") {
        sink.out() << "city,median_death_year\n";
        for (const auto& [city, year] :
             musekb::median_death_year(records, labels, o.min_deaths))
            sink.out() << csv_escape(city) << ',' << year << '\n';
    } else {
        musekb::HistField field;
        if (o.field == "birth_year") field = musekb::HistField::BirthYear;
        else if (o.field == "death_year") field = musekb::HistField::DeathYear;
        else field = musekb::HistField::BirthPlaceProvince;
        musekb::HistBin bin;
        if (o.bin == "decade") bin = musekb::HistBin::Decade;
        else if (o.bin == "year") bin = musekb::HistBin::Year;
        else bin = musekb::HistBin::Province;
        if ((field == musekb::HistField::BirthPlaceProvince) !=
            (bin == musekb::HistBin::Province)) {
            std::cerr << "musekb: --field birth_place_province requires --bin "
                         "province (and vice versa)\n";
            return 2;
        }
        sink.out() << "bin,count\n";
        for (const auto& row : musekb::histogram(records, field, bin, provinces))
            sink.out() << csv_escape(row.bin) << ',' << row.count << '\n';
    }
    sink.finish(o.out);
    return 0;
}

struct MineOpts {
    std::string docs, group_by, stopwords, out;
    std::vector<std::string> filters;
    long top = 100;
    long min_len = 3;
};

int cmd_mine_terms(const MineOpts& o, const Common& c) {
    auto docs = musekb::load_documents(o.docs);
    if (!o.filters.empty()) {
        std::vector<musekb::FieldCondition> conditions;
        for (const auto& f : o.filters) {
            auto eq = f.find('=');
            if (eq == std::string::npos || eq == 0) {
                std::cerr << "musekb: --filter expects field=value, got '" << f
                          << "'\n";
                return 2;
            }
            conditions.push_back({f.substr(0, eq), f.substr(eq + 1)});
        }
        docs = musekb::filter_records(docs, conditions);
    }
    std::unordered_set<std::string> stopwords;
    if (!o.stopwords.empty()) stopwords = musekb::load_wordlist(o.stopwords);

    std::map<std::string, musekb::TermTable> tables;
    if (o.group_by.empty()) {
        auto table = musekb::term_frequencies(
            docs, stopwords, static_cast<size_t>(o.min_len));
        tables.emplace(table.group, std::move(table));
    } else {
        tables = musekb::group_compare(docs, o.group_by, stopwords,
                                       static_cast<size_t>(o.min_len));
    }

    Sink sink(o.out);
    write_header(sink.out(), "mine-terms",
                 {{"docs", o.docs}, {"top", std::to_string(o.top)}},
                 c.no_header);
    sink.out() << "group,term,count,weight\n";
    for (const auto& [group, table] : tables) {
        size_t n = table.rows.size();
        if (o.top > 0) n = std::min(n, static_cast<size_t>(o.top));
        for (size_t i = 0; i < n; ++i)
            sink.out() << csv_escape(group) << ',' << csv_escape(table.rows[i].term)
                       << ',' << table.rows[i].count << ','
                       << fmt("%.6f", table.rows[i].weight) << '\n';
    }
    sink.finish(o.out);
    return 0;
}

struct SentimentOpts {
    std::string reviews, lexicon, negations, out, scores_out;
    double min_ratio = 0.3;
    long min_support = 2;
    bool serial = false;
};

int cmd_sentiment(const SentimentOpts& o, const Common& c) {
    auto docs = musekb::load_documents(o.reviews);
    auto lexicon = musekb::SentimentLexicon::load(
        o.lexicon, o.negations.empty()
                       ? std::nullopt
                       : std::optional<std::string>(o.negations));
    musekb::RulePosTagger tagger;
    musekb::SentimentConfig cfg;
    cfg.min_ratio = o.min_ratio;
    cfg.min_support = o.min_support;
    auto results = o.serial
                       ? musekb::analyze_corpus_serial(docs, lexicon, tagger, cfg)
                       : musekb::analyze_corpus(docs, lexicon, tagger, cfg);

    Sink sink(o.out);
    write_header(sink.out(), "sentiment",
                 {{"reviews", o.reviews}, {"lexicon", o.lexicon}}, c.no_header);
    for (const auto& r : results)
        for (const auto& op : r.opinions) {
            sink.out() << r.doc_id << '\t' << op.sentence_index << '\t'
                       << op.aspect << '\t' << musekb::to_string(op.kind) << '\t'
                       << (op.sentiment_word ? *op.sentiment_word : "") << '\t';
            if (op.score) sink.out() << fmt("%.4f", *op.score);
            else sink.out() << "neutral";
            sink.out() << '\t' << (op.negated ? 1 : 0) << '\n';
        }
    sink.finish(o.out);

    if (!o.scores_out.empty()) {
        Sink scores(o.scores_out);
        write_header(scores.out(), "sentiment scores",
                     {{"reviews", o.reviews}}, c.no_header);
        for (const auto& r : results)
            scores.out() << r.doc_id << '\t' << fmt("%.6f", r.score) << '\n';
        scores.finish(o.scores_out);
    }
    return 0;
}

struct BuildGraphOpts {
    std::string docs, annotations, subjects, scope = "all", entities, out;
    bool weighted = false;
};

int cmd_build_graph(const BuildGraphOpts& o, const Common& c) {
    (void)c;
    auto docs = musekb::load_documents(o.docs);
    auto annotations = read_annotations(o.annotations, docs);
    auto subjects = read_subjects(o.subjects);
    musekb::BuildGraphOptions opts;
    opts.scope = o.scope == "internal" ? musekb::GraphScope::Internal
                                       : musekb::GraphScope::All;
    opts.weighted = o.weighted;

    std::optional<std::vector<musekb::EntityRecord>> entities;
    if (!o.entities.empty()) entities = musekb::load_entities(o.entities);
    auto graph = musekb::build_graph(docs, annotations, subjects, opts,
                                     entities ? &*entities : nullptr);
    musekb::save_graph(o.out, graph);
    std::cout << "graph: " << graph.nodes.size() << " nodes, "
              << graph.edges.size() << " edges, scope "
              << musekb::to_string(opts.scope) << " -> " << o.out << '\n';
    return 0;
}

struct RankOpts {
    std::string graph, algo = "pagerank", category, gold, out;
    long top = 10;
    double damping = 0.85;
    double tol = 1e-8;
    long max_iter = 200;
};

int cmd_rank(const RankOpts& o, const Common& c) {
    auto graph = musekb::load_graph(o.graph);
    musekb::RankResult result;
    if (o.algo == "pagerank") {
        musekb::PageRankOptions opts;
        opts.damping = o.damping;
        opts.tol = o.tol;
        opts.max_iter = static_cast<int>(o.max_iter);
        result = musekb::pagerank(graph, opts);
    } else {
        musekb::HitsOptions opts;
        opts.tol = o.tol;
        opts.max_iter = static_cast<int>(o.max_iter);
        result = musekb::hits(graph, opts).first;  // authority side
    }

    std::optional<musekb::Category> category;
    if (!o.category.empty()) category = musekb::category_from(o.category);
    size_t eligible = 0;
    for (const auto& n : graph.nodes)
        if (!category || n.category == *category) ++eligible;
    size_t k = std::min(static_cast<size_t>(o.top), eligible);

    Sink sink(o.out);
    write_header(sink.out(), "rank",
                 {{"graph", o.graph}, {"algo", o.algo},
                  {"top", std::to_string(o.top)}},
                 c.no_header);
    std::vector<std::string> ranked;
    if (k > 0) ranked = musekb::rank_entities(graph, result, category, k);
    std::map<std::string, double> score_by_id;
    for (size_t i = 0; i < graph.nodes.size(); ++i)
        score_by_id[graph.nodes[i].id] = result.scores[i];
    for (size_t i = 0; i < ranked.size(); ++i)
        sink.out() << i + 1 << '\t' << ranked[i] << '\t'
                   << fmt("%.8f", score_by_id[ranked[i]]) << '\n';
    if (!o.gold.empty()) {
        std::set<std::string> gold;
        auto rows = read_tsv(o.gold);
        for (size_t i = 0; i < rows.size(); ++i) {
            require_cols(o.gold, i, rows[i], 1);
            gold.insert(rows[i][0]);
        }
        double p = ranked.empty()
                       ? 0.0
                       : musekb::precision_at_k(ranked, gold, ranked.size());
        sink.out() << "EVAL\tprecision_at_" << ranked.size() << '\t'
                   << fmt("%.6f", p) << '\n';
    }
    sink.finish(o.out);
    return 0;
}

struct DiachronicOpts {
    std::string reviews, scores, key = "review", value = "sentiment";
    std::string correlate, out;
    bool by_genre = false;
    bool kde = false;
    long smooth = 5;
    long kde_points = 256;
};

std::map<std::string, double> read_scores(const std::string& path) {
    std::map<std::string, double> scores;
    auto rows = read_tsv(path);
    for (size_t i = 0; i < rows.size(); ++i) {
        require_cols(path, i, rows[i], 2);
        try {
            scores[rows[i][0]] = std::stod(rows[i][1]);
        } catch (const std::exception&) {
            throw musekb::ParseError(path + ": row " + std::to_string(i + 1) +
                                     ": expected a number, got '" + rows[i][1] +
                                     "'");
        }
    }
    return scores;
}

int cmd_diachronic(const DiachronicOpts& o, const Common& c) {
    auto reviews = musekb::load_reviews(o.reviews);
    std::map<std::string, double> scores;
    if (!o.scores.empty()) scores = read_scores(o.scores);
    auto key = musekb::year_key_from(o.key);
    auto value = musekb::value_kind_from(o.value);
    if (value == musekb::ValueKind::Sentiment && o.scores.empty()) {
        std::cerr << "musekb: --value sentiment requires --scores\n";
        return 2;
    }

    Sink sink(o.out);

    if (o.kde) {
        // Density of the keyed year axis (review years, or release years).
        std::vector<double> samples;
        for (const auto& r : reviews) {
            if (key == musekb::YearKey::AlbumYear) {
                if (r.album_release_date) samples.push_back(r.album_release_date->year);
            } else {
                samples.push_back(r.review_date.year);
            }
        }
        auto curve = musekb::kde(samples, {}, {},
                                 static_cast<size_t>(o.kde_points));
        write_header(
            sink.out(), "diachronic kde",
            {{"reviews", o.reviews},
             {"bandwidth", fmt("%.6f", musekb::silverman_bandwidth(samples))}},
            c.no_header);
        sink.out() << "x,density\n";
        for (size_t i = 0; i < curve.grid.size(); ++i)
            sink.out() << fmt("%.6f", curve.grid[i]) << ','
                       << fmt("%.8f", curve.density[i]) << '\n';
        sink.finish(o.out);
        return 0;
    }

    write_header(sink.out(), "diachronic",
                 {{"reviews", o.reviews}, {"key", o.key}, {"value", o.value},
                  {"smooth", std::to_string(o.smooth)}},
                 c.no_header);

    auto emit = [&](const std::string& genre_prefix,
                    const std::vector<musekb::Review>& subset) {
        long skipped = 0;
        auto series = musekb::yearly_average(subset, scores, key, value, &skipped);
        auto smoothed = musekb::smooth(series, static_cast<int>(o.smooth));
        for (const auto& p : smoothed.points) {
            if (!genre_prefix.empty()) sink.out() << csv_escape(genre_prefix) << ',';
            sink.out() << p.year << ',' << fmt("%.6f", p.value) << ',' << p.n
                       << '\n';
        }
        return skipped;
    };

    long skipped = 0;
    if (o.by_genre) {
        std::map<std::string, std::vector<musekb::Review>> by_genre;
        for (const auto& r : reviews) by_genre[r.genre].push_back(r);
        sink.out() << "genre,year," << o.value << ",n\n";
        for (const auto& [genre, subset] : by_genre) skipped += emit(genre, subset);
    } else {
        sink.out() << "year," << o.value << ",n\n";
        skipped = emit("", reviews);
    }
    sink.finish(o.out);
    if (skipped > 0)
        std::cerr << "diachronic: skipped " << skipped
                  << " reviews (missing score or release date)\n";

    if (!o.correlate.empty()) {
        auto other_value = musekb::value_kind_from(o.correlate);
        long s1 = 0, s2 = 0;
        auto lhs = musekb::yearly_average(reviews, scores, key, value, &s1);
        auto rhs = musekb::yearly_average(reviews, scores, key, other_value, &s2);
        std::map<int, double> rhs_by_year;
        for (const auto& p : rhs.points) rhs_by_year[p.year] = p.value;
        musekb::YearSeries lhs_common, rhs_common;
        for (const auto& p : lhs.points) {
            auto it = rhs_by_year.find(p.year);
            if (it == rhs_by_year.end()) continue;
            lhs_common.points.push_back(p);
            rhs_common.points.push_back({p.year, it->second, p.n});
        }
        auto ls = musekb::smooth(lhs_common, static_cast<int>(o.smooth));
        auto rs = musekb::smooth(rhs_common, static_cast<int>(o.smooth));
        std::vector<double> xs, ys;
        for (const auto& p : ls.points) xs.push_back(p.value);
        for (const auto& p : rs.points) ys.push_back(p.value);
        auto corr = musekb::pearson(xs, ys);
        std::cout << "correlation " << o.value << '~' << o.correlate
                  << " r=" << fmt("%.6f", corr.r)
                  << " p=" << fmt("%.6g", corr.p_value) << " n=" << corr.n
                  << '\n';
    }
    return 0;
}

struct ReportOpts {
    std::string manifest, data_dir, out_dir = "report_out";
};

int cmd_report(const ReportOpts& o, const Common& c, int depth) {
    if (depth > 0)
        throw musekb::ValidationError("report: manifests cannot nest report "
                                      "stages");
    std::ifstream in(o.manifest, std::ios::binary);
    if (!in)
        throw musekb::IoError("cannot open '" + o.manifest + "' for reading");
    ordered_json manifest;
    try {
        manifest = ordered_json::parse(in);
    } catch (const ordered_json::exception& e) {
        throw musekb::ParseError(o.manifest + ": invalid JSON: " + e.what());
    }
    if (!manifest.is_object() || !manifest.contains("stages") ||
        !manifest["stages"].is_array())
        throw musekb::ValidationError(o.manifest +
                                      ": expected an object with a 'stages' "
                                      "array");

    fs::path data_dir = o.data_dir;
    if (o.data_dir.empty()) {
        const char* env = std::getenv("MUSEKB_DATA_DIR");
        data_dir = env ? fs::path(env) : fs::path(o.manifest).parent_path();
    }
    fs::path out_dir = o.out_dir;
    fs::create_directories(out_dir);

    // Values of these keys are input paths, resolved out-dir first (so
    // stages can consume earlier outputs), then data-dir.
    static const std::set<std::string> input_keys = {
        "a", "b", "docs", "entities", "reviews", "scores", "annotations",
        "subjects", "graph", "lexicon", "negations", "gold", "records",
        "stopwords"};
    static const std::set<std::string> output_keys = {"out", "scores-out"};

    const auto& stages = manifest["stages"];
    for (size_t i = 0; i < stages.size(); ++i) {
        const auto& stage = stages[i];
        if (!stage.is_object() || !stage.contains("run") ||
            !stage["run"].is_string())
            throw musekb::ValidationError(
                o.manifest + ": stage " + std::to_string(i + 1) +
                ": expected an object with a 'run' subcommand name");
        std::string run = stage["run"].get<std::string>();
        std::vector<std::string> args{run};
        if (stage.contains("with")) {
            if (!stage["with"].is_object())
                throw musekb::ValidationError(o.manifest + ": stage " +
                                              std::to_string(i + 1) +
                                              ": 'with' must be an object");
            for (const auto& [key, val] : stage["with"].items()) {
                std::string sval =
                    val.is_string() ? val.get<std::string>() : val.dump();
                if (output_keys.count(key)) {
                    fs::path p = fs::path(sval).is_absolute()
                                     ? fs::path(sval)
                                     : out_dir / sval;
                    args.push_back("--" + key);
                    args.push_back(p.string());
                } else if (input_keys.count(key)) {
                    fs::path p(sval);
                    if (!p.is_absolute()) {
                        if (fs::exists(out_dir / p)) p = out_dir / p;
                        else p = data_dir / p;
                    }
                    args.push_back("--" + key);
                    args.push_back(p.string());
                } else if (val.is_boolean() || sval == "true" ||
                           sval == "false") {
                    if (val.is_boolean() ? val.get<bool>() : sval == "true")
                        args.push_back("--" + key);
                } else {
                    args.push_back("--" + key);
                    args.push_back(sval);
                }
            }
        }
        // Stage outputs are data artifacts consumed downstream: always
        // headerless so reruns are byte-identical.
        args.push_back("--no-header");
        if (c.jobs > 0) {
            args.push_back("--jobs");
            args.push_back(std::to_string(c.jobs));
        }
        std::cout << "[stage " << i + 1 << '/' << stages.size() << "] " << run
                  << '\n';
        int rc = run_cli(args, depth + 1);
        if (rc != 0) {
            std::cerr << "report: stage " << i + 1 << " (" << run
                      << ") failed with exit code " << rc << '\n';
            return rc;
        }
    }
    return 0;
}

// ------------------------------------------------------------ CLI wiring

int run_cli(const std::vector<std::string>& args, int depth) {
    CLI::App app{"musekb: music-document corpora to structured knowledge"};
    app.require_subcommand(1);

    int jobs = 0;
    bool no_header = false;
    app.add_option("--jobs", jobs,
                   "worker threads for the parallel kernels (0 = hardware)")
        ->check(CLI::NonNegativeNumber);
    app.add_flag("--no-header", no_header,
                 "omit the generated-at header lines from outputs");

    // ingest -------------------------------------------------------------
    std::string in_docs, in_entities, in_reviews, in_albums, in_records;
    auto* ingest = app.add_subcommand(
        "ingest", "validate corpus files and print record counts");
    ingest->fallthrough();
    ingest->add_option("--docs", in_docs, "documents JSONL");
    ingest->add_option("--entities", in_entities, "entity records JSONL");
    ingest->add_option("--reviews", in_reviews, "review records JSONL");
    ingest->add_option("--albums", in_albums, "album records JSONL");
    ingest->add_option("--records", in_records, "vital records JSONL");

    // resolve ------------------------------------------------------------
    ResolveOpts ro;
    auto* resolve = app.add_subcommand(
        "resolve", "match entity records across two sources");
    resolve->fallthrough();
    resolve->add_option("--a", ro.a, "first entity file (JSONL)")->required();
    resolve->add_option("--b", ro.b, "second entity file (JSONL)")->required();
    resolve->add_option("--theta", ro.theta, "similarity threshold")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    resolve->add_option("--gold", ro.gold, "gold pairs TSV (a_id, b_id)");
    auto* sweep_opt =
        resolve->add_option("--sweep", ro.sweep,
                            "evaluate a lo:step:hi threshold range");
    sweep_opt->needs(resolve->get_option("--gold"));
    resolve->add_option("-o,--out", ro.out, "output file (default stdout)");

    // link ---------------------------------------------------------------
    LinkOpts lo;
    auto* link = app.add_subcommand(
        "link", "annotate entity mentions in documents");
    link->fallthrough();
    link->add_option("--docs", lo.docs, "documents JSONL")->required();
    link->add_option("--entities", lo.entities, "gazetteer entities JSONL")
        ->required();
    link->add_option("--strategy", lo.strategy,
                     "candidate gating: spans | ner-pl | ner-l")
        ->capture_default_str()
        ->check(CLI::IsMember({"spans", "ner-pl", "ner-l"}));
    link->add_option("--gold", lo.gold, "gold annotations TSV");
    link->add_flag("--serial", lo.serial, "use the serial reference kernel");
    link->add_option("-o,--out", lo.out, "output file (default stdout)");

    // extract-bio ----------------------------------------------------------
    BioOpts bo;
    auto* bio = app.add_subcommand(
        "extract-bio", "extract birth/death facts from biographies");
    bio->fallthrough();
    bio->add_option("--docs", bo.docs, "documents JSONL")->required();
    bio->add_option("--entities", bo.entities, "gazetteer entities JSONL")
        ->required();
    bio->add_option("--pattern", bo.pattern,
                    "extraction pattern: trigger | parenthetical")
        ->capture_default_str()
        ->check(CLI::IsMember({"trigger", "parenthetical"}));
    bio->add_option("--subjects", bo.subjects,
                    "doc_id -> subject entity TSV (default: doc id)");
    bio->add_option("--gold", bo.gold, "gold vital records JSONL")
        ->needs(bio->add_option("-o,--out", bo.out,
                                "output file (default stdout)"));

    // demography -----------------------------------------------------------
    DemographyOpts dgo;
    auto* demography = app.add_subcommand(
        "demography", "aggregate vital records into tables");
    demography->fallthrough();
    demography->add_option("--records", dgo.records, "vital records JSONL")
        ->required();
    demography->add_option("--table", dgo.table,
                           "table: flow | median | histogram")
        ->capture_default_str()
        ->check(CLI::IsMember({"flow", "median", "histogram"}));
    demography->add_option("--entities", dgo.entities,
                           "entities JSONL for labels/provinces");
    demography->add_option("--sort", dgo.sort, "flow sort column")
        ->capture_default_str()
        ->check(CLI::IsMember({"births", "deaths"}));
    demography->add_option("--min-deaths", dgo.min_deaths,
                           "median table: minimum deaths per city")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    demography->add_option("--field", dgo.field, "histogram field")
        ->capture_default_str()
        ->check(CLI::IsMember(
            {"birth_year", "death_year", "birth_place_province"}));
    demography->add_option("--bin", dgo.bin, "histogram bin")
        ->capture_default_str()
        ->check(CLI::IsMember({"decade", "year", "province"}));
    demography->add_option("-o,--out", dgo.out, "output file (default stdout)");

    // mine-terms -----------------------------------------------------------
    MineOpts mo;
    auto* mine = app.add_subcommand(
        "mine-terms", "word frequency tables per document group");
    mine->fallthrough();
    mine->add_option("--docs", mo.docs, "documents JSONL")->required();
    mine->add_option("--group-by", mo.group_by,
                     "document field to split tables by");
    mine->add_option("--stopwords", mo.stopwords, "stopword list file");
    mine->add_option("--top", mo.top, "rows per group (0 = all)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    mine->add_option("--min-len", mo.min_len, "minimum term length (codepoints)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    mine->add_option("--filter", mo.filters,
                     "keep docs with field=value (repeatable)");
    mine->add_option("-o,--out", mo.out, "output file (default stdout)");

    // sentiment ------------------------------------------------------------
    SentimentOpts so;
    auto* sentiment = app.add_subcommand(
        "sentiment", "aspect-based sentiment over review documents");
    sentiment->fallthrough();
    sentiment->add_option("--reviews", so.reviews, "review documents JSONL")
        ->required();
    sentiment->add_option("--lexicon", so.lexicon, "word polarity file")
        ->required();
    sentiment->add_option("--negations", so.negations, "negation terms file");
    sentiment->add_option("--min-ratio", so.min_ratio,
                          "single-noun co-occurrence ratio")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    sentiment->add_option("--min-support", so.min_support,
                          "single-noun sentence support")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sentiment->add_flag("--serial", so.serial, "use the serial reference kernel");
    sentiment->add_option("-o,--out", so.out, "opinions file (default stdout)");
    sentiment->add_option("--scores-out", so.scores_out,
                          "per-review score TSV");

    // build-graph ----------------------------------------------------------
    BuildGraphOpts bgo;
    auto* build = app.add_subcommand(
        "build-graph", "subject -> mention knowledge graph from annotations");
    build->fallthrough();
    build->add_option("--docs", bgo.docs, "documents JSONL")->required();
    build->add_option("--annotations", bgo.annotations,
                      "annotations TSV (the link output format)")
        ->required();
    build->add_option("--subjects", bgo.subjects, "doc_id -> entity TSV")
        ->required();
    build->add_option("--scope", bgo.scope, "graph scope: internal | all")
        ->capture_default_str()
        ->check(CLI::IsMember({"internal", "all"}));
    build->add_option("--entities", bgo.entities,
                      "entities JSONL for node categories/attributes");
    build->add_flag("--weighted", bgo.weighted, "edges carry mention counts");
    build->add_option("-o,--out", bgo.out, "graph file")->required();

    // rank -----------------------------------------------------------------
    RankOpts rko;
    auto* rank = app.add_subcommand(
        "rank", "order graph nodes by link-analysis relevance");
    rank->fallthrough();
    rank->add_option("--graph", rko.graph, "graph file")->required();
    rank->add_option("--algo", rko.algo, "algorithm: pagerank | hits")
        ->capture_default_str()
        ->check(CLI::IsMember({"pagerank", "hits"}));
    rank->add_option("--category", rko.category,
                     "restrict to one category (Person, Location, ...)");
    rank->add_option("--top", rko.top, "list length")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    rank->add_option("--damping", rko.damping, "PageRank damping factor")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    rank->add_option("--tol", rko.tol, "convergence tolerance")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    rank->add_option("--max-iter", rko.max_iter, "iteration cap")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    rank->add_option("--gold", rko.gold, "expert list (one entity id per line)");
    rank->add_option("-o,--out", rko.out, "output file (default stdout)");

    // diachronic -----------------------------------------------------------
    DiachronicOpts dio;
    auto* diachronic = app.add_subcommand(
        "diachronic", "yearly series, smoothing, correlation, density");
    diachronic->fallthrough();
    diachronic->add_option("--reviews", dio.reviews, "review records JSONL")
        ->required();
    diachronic->add_option("--scores", dio.scores, "per-review score TSV");
    diachronic->add_option("--key", dio.key, "year axis: review | album")
        ->capture_default_str()
        ->check(CLI::IsMember({"review", "album"}));
    diachronic->add_option("--value", dio.value, "series: sentiment | rating")
        ->capture_default_str()
        ->check(CLI::IsMember({"sentiment", "rating"}));
    diachronic->add_flag("--by-genre", dio.by_genre, "one series per genre");
    auto* smooth_opt =
        diachronic
            ->add_option("--smooth", dio.smooth,
                         "moving-average window (odd; 1 = raw)")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
    diachronic->add_option("--correlate", dio.correlate,
                           "second series to correlate against")
        ->check(CLI::IsMember({"sentiment", "rating"}));
    auto* kde_flag = diachronic->add_flag(
        "--kde", dio.kde, "emit a density curve of the year axis instead");
    diachronic->add_option("--kde-points", dio.kde_points, "density grid size")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    kde_flag->excludes(smooth_opt);
    kde_flag->excludes(diachronic->get_option("--correlate"));
    kde_flag->excludes(diachronic->get_option("--by-genre"));
    diachronic->add_option("-o,--out", dio.out, "output file (default stdout)");

    // report ---------------------------------------------------------------
    ReportOpts rpo;
    auto* report = app.add_subcommand(
        "report", "run a manifest of stages against a data directory");
    report->fallthrough();
    report->add_option("--manifest", rpo.manifest, "stage manifest JSON")
        ->required();
    report->add_option("--data-dir", rpo.data_dir,
                       "input root (default: $MUSEKB_DATA_DIR, else the "
                       "manifest's directory)");
    report->add_option("--out-dir", rpo.out_dir, "output root")
        ->capture_default_str();

    // ----------------------------------------------------------------------
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("musekb");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints help, returns 0
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "musekb: " << e.what() << "\n";
        std::cerr << "Run 'musekb --help' for usage.\n";
        return 2;
    }

    if (jobs > 0) omp_set_num_threads(jobs);
    Common common{jobs, no_header};

    try {
        if (ingest->parsed()) {
            if (in_docs.empty() && in_entities.empty() && in_reviews.empty() &&
                in_albums.empty() && in_records.empty()) {
                std::cerr << "musekb: ingest needs at least one of --docs, "
                             "--entities, --reviews, --albums, --records\n";
                return 2;
            }
            return cmd_ingest(in_docs, in_entities, in_reviews, in_albums,
                              in_records);
        }
        if (resolve->parsed()) return cmd_resolve(ro, common);
        if (link->parsed()) return cmd_link(lo, common);
        if (bio->parsed()) return cmd_extract_bio(bo, common);
        if (demography->parsed()) return cmd_demography(dgo, common);
        if (mine->parsed()) return cmd_mine_terms(mo, common);
        if (sentiment->parsed()) return cmd_sentiment(so, common);
        if (build->parsed()) return cmd_build_graph(bgo, common);
        if (rank->parsed()) return cmd_rank(rko, common);
        if (diachronic->parsed()) return cmd_diachronic(dio, common);
        if (report->parsed()) return cmd_report(rpo, common, depth);
    } catch (const musekb::Error& e) {
        std::cerr << "musekb: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "musekb: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, 0);
}
