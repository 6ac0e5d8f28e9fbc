#include "musekb/kgraph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <tuple>

#include <json.hpp>

#include "musekb/errors.hpp"

namespace musekb {

using json = nlohmann::ordered_json;

GraphScope scope_from(std::string_view s) {
    if (s == "internal") return GraphScope::Internal;
    if (s == "all") return GraphScope::All;
    throw ParseError("unknown scope '" + std::string(s) + "' (expected internal|all)");
}

std::string to_string(GraphScope s) {
    return s == GraphScope::Internal ? "internal" : "all";
}

std::string to_string(RankAlgo a) {
    switch (a) {
        case RankAlgo::PageRank: return "pagerank";
        case RankAlgo::HitsAuthority: return "hits_authority";
        case RankAlgo::HitsHub: return "hits_hub";
    }
    return {};
}

size_t KGraph::node_index(const std::string& id) const {
    const auto it = index.find(id);
    if (it == index.end())
        throw ValidationError("node '" + id + "' not in graph");
    return it->second;
}

KGraph build_graph(const std::vector<Document>& docs,
                   const std::vector<std::vector<Annotation>>& annotations,
                   const std::map<std::string, std::string>& subjects,
                   const BuildGraphOptions& opts,
                   const std::vector<EntityRecord>* entities) {
    if (annotations.size() != docs.size())
        throw ConfigError("annotation lists do not match document count");

    std::unordered_map<std::string, const EntityRecord*> kb;
    if (entities)
        for (const EntityRecord& e : *entities) kb[e.id] = &e;

    KGraph g;
    g.scope = opts.scope;

    auto entity_or_fail = [&](const std::string& id) -> const EntityRecord* {
        if (!entities) return nullptr;
        const auto it = kb.find(id);
        if (it == kb.end())
            throw ValidationError("unknown entity '" + id + "' referenced");
        return it->second;
    };

    auto add_node = [&](const std::string& id, Category category) -> uint32_t {
        const auto it = g.index.find(id);
        if (it != g.index.end()) return it->second;
        KNode node;
        node.id = id;
        if (const EntityRecord* e = entity_or_fail(id)) {
            node.category = e->category;
            node.attributes = e->attributes;
        } else {
            node.category = category;
        }
        const auto idx = static_cast<uint32_t>(g.nodes.size());
        g.nodes.push_back(std::move(node));
        g.index[id] = idx;
        return idx;
    };

    // Every subject becomes a node, in document order.
    std::set<std::string> subject_set;
    std::vector<uint32_t> subject_idx(docs.size());
    for (size_t d = 0; d < docs.size(); ++d) {
        const auto it = subjects.find(docs[d].id);
        if (it == subjects.end())
            throw ValidationError("document '" + docs[d].id + "' has no subject entry");
        subject_set.insert(it->second);
    }
    for (size_t d = 0; d < docs.size(); ++d)
        subject_idx[d] = add_node(subjects.at(docs[d].id), Category::Person);

    std::map<std::pair<uint32_t, uint32_t>, long> edge_counts;
    for (size_t d = 0; d < docs.size(); ++d) {
        const uint32_t src = subject_idx[d];
        const std::string& subject_id = g.nodes[src].id;
        for (const Annotation& a : annotations[d]) {
            if (a.entity_id == subject_id) continue;  // no self-loops
            if (opts.scope == GraphScope::Internal && !subject_set.count(a.entity_id))
                continue;
            entity_or_fail(a.entity_id);
            const uint32_t dst = add_node(a.entity_id, a.category);
            ++edge_counts[{src, dst}];
        }
    }

    g.edges.reserve(edge_counts.size());
    for (const auto& [key, count] : edge_counts)
        g.edges.push_back({key.first, key.second, opts.weighted ? count : 1});
    // std::map ordering already gives (src, dst) ascending
    return g;
}

void save_graph(const std::string& path, const KGraph& g) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "G\t" << to_string(g.scope) << '\n';
    // Nodes sorted by id; edges by (src id, dst id).
    std::vector<const KNode*> nodes;
    nodes.reserve(g.nodes.size());
    for (const KNode& n : g.nodes) nodes.push_back(&n);
    std::sort(nodes.begin(), nodes.end(),
              [](const KNode* x, const KNode* y) { return x->id < y->id; });
    for (const KNode* n : nodes) {
        json attrs = json::object();
        for (const auto& [k, v] : n->attributes) attrs[k] = v;
        out << "N\t" << n->id << '\t' << to_string(n->category) << '\t'
            << attrs.dump() << '\n';
    }
    std::vector<std::pair<std::string, std::pair<std::string, long>>> edges;
    edges.reserve(g.edges.size());
    for (const KEdge& e : g.edges)
        edges.push_back({g.nodes[e.src].id, {g.nodes[e.dst].id, e.weight}});
    std::sort(edges.begin(), edges.end());
    for (const auto& [src, rest] : edges)
        out << "E\t" << src << '\t' << rest.first << '\t' << rest.second << '\n';
    if (!out) throw IoError("error while writing '" + path + "'");
}

KGraph load_graph(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    KGraph g;
    std::string line;
    size_t lineno = 0;
    bool scope_seen = false;
    auto fail = [&](const std::string& msg) -> void {
        throw ParseError(path + ":" + std::to_string(lineno) + ": " + msg);
    };
    std::vector<std::tuple<std::string, std::string, long>> pending_edges;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cols;
        size_t pos = 0;
        while (true) {
            const size_t tab = line.find('\t', pos);
            cols.push_back(line.substr(pos, tab - pos));
            if (tab == std::string::npos) break;
            pos = tab + 1;
        }
        if (cols[0] == "G") {
            if (cols.size() != 2) fail("malformed scope line");
            g.scope = scope_from(cols[1]);
            scope_seen = true;
        } else if (cols[0] == "N") {
            if (cols.size() != 4) fail("malformed node line");
            KNode n;
            n.id = cols[1];
            try {
                n.category = category_from(cols[2]);
            } catch (const ParseError& e) {
                fail(e.what());
            }
            json attrs;
            try {
                attrs = json::parse(cols[3]);
            } catch (const json::exception& e) {
                fail(std::string("bad attributes: ") + e.what());
            }
            for (const auto& [k, v] : attrs.items())
                n.attributes[k] = v.get<std::string>();
            if (g.index.count(n.id)) fail("duplicate node '" + n.id + "'");
            g.index[n.id] = static_cast<uint32_t>(g.nodes.size());
            g.nodes.push_back(std::move(n));
        } else if (cols[0] == "E") {
            if (cols.size() != 4) fail("malformed edge line");
            long w = 0;
            try {
                w = std::stol(cols[3]);
            } catch (...) {
                fail("bad edge weight '" + cols[3] + "'");
            }
            pending_edges.emplace_back(cols[1], cols[2], w);
        } else {
            fail("unknown record type '" + cols[0] + "'");
        }
    }
    if (in.bad()) throw IoError("error while reading '" + path + "'");
    if (!scope_seen) throw ParseError(path + ": missing scope line");
    for (const auto& [src, dst, w] : pending_edges) {
        const auto si = g.index.find(src), di = g.index.find(dst);
        if (si == g.index.end() || di == g.index.end())
            throw ParseError(path + ": edge references unknown node");
        g.edges.push_back({si->second, di->second, w});
    }
    std::sort(g.edges.begin(), g.edges.end(), [](const KEdge& x, const KEdge& y) {
        if (x.src != y.src) return x.src < y.src;
        return x.dst < y.dst;
    });
    return g;
}

namespace {

void check_rank_inputs(const KGraph& g, double tol, int max_iter) {
    if (g.nodes.empty()) throw ValidationError("graph is empty");
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
    if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
}

} // namespace

RankResult pagerank(const KGraph& g, const PageRankOptions& opts) {
    check_rank_inputs(g, opts.tol, opts.max_iter);
    if (!(opts.damping > 0.0 && opts.damping < 1.0))
        throw ConfigError("damping must lie in (0,1)");

    const size_t n = g.nodes.size();
    std::vector<double> out_weight(n, 0.0);
    for (const KEdge& e : g.edges) out_weight[e.src] += static_cast<double>(e.weight);

    RankResult res;
    res.algorithm = RankAlgo::PageRank;
    std::vector<double> x(n, 1.0 / static_cast<double>(n)), next(n, 0.0);
    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        std::fill(next.begin(), next.end(), 0.0);
        double dangling = 0.0;
        for (size_t i = 0; i < n; ++i)
            if (out_weight[i] == 0.0) dangling += x[i];
        for (const KEdge& e : g.edges)
            next[e.dst] += x[e.src] * static_cast<double>(e.weight) / out_weight[e.src];
        const double teleport = (1.0 - opts.damping) / static_cast<double>(n);
        const double dangling_share = opts.damping * dangling / static_cast<double>(n);
        double delta = 0.0;
        for (size_t i = 0; i < n; ++i) {
            next[i] = opts.damping * next[i] + dangling_share + teleport;
            delta += std::abs(next[i] - x[i]);
        }
        x.swap(next);
        res.iterations_run = iter;
        if (delta < opts.tol) {
            res.converged = true;
            break;
        }
    }
    res.scores = std::move(x);
    return res;
}

std::pair<RankResult, RankResult> hits(const KGraph& g, const HitsOptions& opts) {
    check_rank_inputs(g, opts.tol, opts.max_iter);
    const size_t n = g.nodes.size();
    const double uniform = 1.0 / std::sqrt(static_cast<double>(n));

    auto l2_normalize = [&](std::vector<double>& v) {
        double ss = 0.0;
        for (double x : v) ss += x * x;
        if (ss == 0.0) {
            std::fill(v.begin(), v.end(), uniform);
            return;
        }
        const double inv = 1.0 / std::sqrt(ss);
        for (double& x : v) x *= inv;
    };

    std::vector<double> authority(n, uniform), hub(n, uniform);
    RankResult res_a, res_h;
    res_a.algorithm = RankAlgo::HitsAuthority;
    res_h.algorithm = RankAlgo::HitsHub;

    std::vector<double> next_a(n), next_h(n);
    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        std::fill(next_a.begin(), next_a.end(), 0.0);
        for (const KEdge& e : g.edges)
            next_a[e.dst] += static_cast<double>(e.weight) * hub[e.src];
        l2_normalize(next_a);
        std::fill(next_h.begin(), next_h.end(), 0.0);
        for (const KEdge& e : g.edges)
            next_h[e.src] += static_cast<double>(e.weight) * next_a[e.dst];
        l2_normalize(next_h);

        double delta = 0.0;
        for (size_t i = 0; i < n; ++i)
            delta += std::abs(next_a[i] - authority[i]) + std::abs(next_h[i] - hub[i]);
        authority = next_a;
        hub = next_h;
        res_a.iterations_run = res_h.iterations_run = iter;
        if (delta < opts.tol) {
            res_a.converged = res_h.converged = true;
            break;
        }
    }
    res_a.scores = std::move(authority);
    res_h.scores = std::move(hub);
    return {res_a, res_h};
}

std::vector<std::string> rank_entities(const KGraph& g, const RankResult& result,
                                       std::optional<Category> category, size_t k) {
    if (k < 1) throw ConfigError("k must be >= 1");
    if (result.scores.size() != g.nodes.size())
        throw ConfigError("rank result does not match graph");
    std::vector<size_t> idx;
    idx.reserve(g.nodes.size());
    for (size_t i = 0; i < g.nodes.size(); ++i)
        if (!category || g.nodes[i].category == *category) idx.push_back(i);
    std::sort(idx.begin(), idx.end(), [&](size_t x, size_t y) {
        if (result.scores[x] != result.scores[y])
            return result.scores[x] > result.scores[y];
        return g.nodes[x].id < g.nodes[y].id;
    });
    if (idx.size() > k) idx.resize(k);
    std::vector<std::string> out;
    out.reserve(idx.size());
    for (size_t i : idx) out.push_back(g.nodes[i].id);
    return out;
}

double precision_at_k(const std::vector<std::string>& ranked,
                      const std::set<std::string>& gold, size_t k) {
    if (k < 1) throw ConfigError("k must be >= 1");
    if (k > ranked.size())
        throw ConfigError("k exceeds ranked list length");
    size_t hits_n = 0;
    for (size_t i = 0; i < k; ++i) hits_n += gold.count(ranked[i]);
    return static_cast<double>(hits_n) / static_cast<double>(k);
}

double macro_precision_at_k(
    const std::vector<std::pair<std::vector<std::string>, std::set<std::string>>>& lists,
    size_t k) {
    if (lists.empty()) throw ConfigError("macro precision needs at least one list");
    double sum = 0.0;
    for (const auto& [ranked, gold] : lists) sum += precision_at_k(ranked, gold, k);
    return sum / static_cast<double>(lists.size());
}

} // namespace musekb
