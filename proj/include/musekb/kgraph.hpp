#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "musekb/corpus.hpp"
#include "musekb/linking.hpp"

namespace musekb {

enum class GraphScope { Internal, All };
GraphScope scope_from(std::string_view s);  // internal | all
std::string to_string(GraphScope s);

struct KNode {
    std::string id;
    Category category = Category::Other;
    std::map<std::string, std::string> attributes;
};

struct KEdge {
    uint32_t src = 0;
    uint32_t dst = 0;
    long weight = 1;
};

struct KGraph {
    GraphScope scope = GraphScope::All;
    std::vector<KNode> nodes;  // subjects first (document order), then
                               // mentions on first appearance
    std::vector<KEdge> edges;  // sorted by (src, dst), deduplicated

    size_t node_index(const std::string& id) const;  // throws ValidationError
    std::unordered_map<std::string, uint32_t> index;
};

struct BuildGraphOptions {
    GraphScope scope = GraphScope::All;
    // Default off: an edge per distinct (subject, mention) pair. When on,
    // edges carry mention counts.
    bool weighted = false;
};

// Subject -> mention graph. `subjects` maps every doc id to its subject
// entity; self-mentions add nothing; internal scope keeps only edges whose
// target is itself a subject. When `entities` is given, node categories and
// attributes come from it and unknown entity references are validation
// errors; otherwise categories fall back to the annotation's category.
KGraph build_graph(const std::vector<Document>& docs,
                   const std::vector<std::vector<Annotation>>& annotations,
                   const std::map<std::string, std::string>& subjects,
                   const BuildGraphOptions& opts,
                   const std::vector<EntityRecord>* entities = nullptr);

KGraph load_graph(const std::string& path);
void save_graph(const std::string& path, const KGraph& g);

enum class RankAlgo { PageRank, HitsAuthority, HitsHub };
std::string to_string(RankAlgo a);

struct RankResult {
    std::vector<double> scores;  // indexed like graph.nodes
    RankAlgo algorithm = RankAlgo::PageRank;
    int iterations_run = 0;
    bool converged = false;
};

struct PageRankOptions {
    double damping = 0.85;
    double tol = 1e-8;  // L1 convergence threshold
    int max_iter = 200;
};

// Power iteration on the column-stochastic transition with uniform teleport;
// dangling mass is redistributed uniformly, so scores always sum to 1.
RankResult pagerank(const KGraph& g, const PageRankOptions& opts = {});

struct HitsOptions {
    double tol = 1e-8;
    int max_iter = 200;
};

// Alternating authority <- A^T hub, hub <- A authority, each Euclidean-
// normalized; returns (authority, hub). A zero vector normalizes to uniform.
std::pair<RankResult, RankResult> hits(const KGraph& g, const HitsOptions& opts = {});

// Top-k node ids by score descending, id ascending on ties, optionally
// restricted to one category.
std::vector<std::string> rank_entities(const KGraph& g, const RankResult& result,
                                       std::optional<Category> category, size_t k);

// |top-k of ranked ∩ gold| / k; requires k <= ranked size.
double precision_at_k(const std::vector<std::string>& ranked,
                      const std::set<std::string>& gold, size_t k);

// Mean of per-category precision@k over several (ranked, gold) lists.
double macro_precision_at_k(
    const std::vector<std::pair<std::vector<std::string>, std::set<std::string>>>& lists,
    size_t k);

} // namespace musekb
