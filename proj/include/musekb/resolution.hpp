#pragma once

#include <string>
#include <utility>
#include <vector>

#include "musekb/corpus.hpp"
#include "musekb/text.hpp"

namespace musekb {

struct ResolutionConfig {
    double theta = 0.9;  // minimum similarity for a pair, in [0,1]
    NormalizeOptions normalize;
};

struct ScoredPair {
    std::string a_id;
    std::string b_id;
    double score = 0.0;
};

struct Mapping {
    // Greedy decision order: score descending, then a_id, then b_id.
    std::vector<ScoredPair> pairs;
    std::vector<std::string> unmatched_a;  // input order
    std::vector<std::string> unmatched_b;  // input order
};

// Max gestalt similarity over label x (label + aliases) comparisons, applied
// in both directions; alias x alias is not consulted. Strings are normalized
// first per the config flags.
double record_similarity(const EntityRecord& a, const EntityRecord& b,
                         const NormalizeOptions& normalize);

// Every (a, b) pair scoring >= theta, ordered score-descending with
// (a_id, b_id) tie-break. The similarity grid is computed row-parallel with
// OpenMP; the serial variant is the reference twin the tests compare
// against byte-for-byte.
std::vector<ScoredPair> score_candidates(const std::vector<EntityRecord>& a,
                                         const std::vector<EntityRecord>& b,
                                         const ResolutionConfig& cfg);
std::vector<ScoredPair> score_candidates_serial(const std::vector<EntityRecord>& a,
                                                const std::vector<EntityRecord>& b,
                                                const ResolutionConfig& cfg);

// Greedy descending-score assignment over the candidate pairs, so that no
// a_id or b_id is used twice (injective, generally non-surjective). Equal
// scores resolve to the lexicographically smaller a_id, then b_id.
Mapping resolve(const std::vector<EntityRecord>& a,
                const std::vector<EntityRecord>& b,
                const ResolutionConfig& cfg);

struct PrEval {
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
};

PrEval pr_eval_from_counts(size_t correct, size_t predicted, size_t gold);

// Exact pair matching against gold; empty predicted -> precision 0.
PrEval evaluate_mapping(const Mapping& predicted,
                        const std::vector<std::pair<std::string, std::string>>& gold);

struct SweepRow {
    double theta = 0.0;
    PrEval eval;
};

// One evaluation row per theta, sorted by theta ascending.
std::vector<SweepRow> sweep_threshold(
    const std::vector<EntityRecord>& a, const std::vector<EntityRecord>& b,
    const std::vector<std::pair<std::string, std::string>>& gold,
    std::vector<double> thetas, const NormalizeOptions& normalize = {});

} // namespace musekb
