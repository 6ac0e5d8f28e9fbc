#include "musekb/resolution.hpp"

#include <algorithm>
#include <set>

#include "musekb/errors.hpp"
#include "musekb/similarity.hpp"

namespace musekb {

namespace {

// Decoded normalized comparison forms; element 0 is the label.
using Forms = std::vector<std::u32string>;

Forms comparison_forms(const EntityRecord& e, const NormalizeOptions& normalize) {
    Forms f;
    f.reserve(1 + e.aliases.size());
    f.push_back(utf8_decode(musekb::normalize(e.label, normalize)));
    for (const auto& a : e.aliases)
        f.push_back(utf8_decode(musekb::normalize(a, normalize)));
    return f;
}

double forms_similarity(const Forms& a, const Forms& b) {
    double best = 0.0;
    // label x (label + aliases), both directions; alias x alias skipped.
    for (const auto& bf : b) best = std::max(best, gestalt_similarity(a[0], bf));
    for (const auto& af : a) best = std::max(best, gestalt_similarity(af, b[0]));
    return best;
}

void check_theta(double theta) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw ConfigError("theta must lie in [0,1]");
}

bool pair_less(const ScoredPair& x, const ScoredPair& y) {
    if (x.score != y.score) return x.score > y.score;
    if (x.a_id != y.a_id) return x.a_id < y.a_id;
    return x.b_id < y.b_id;
}

std::vector<ScoredPair> score_grid(const std::vector<EntityRecord>& a,
                                   const std::vector<EntityRecord>& b,
                                   const ResolutionConfig& cfg, bool parallel) {
    check_theta(cfg.theta);
    std::vector<Forms> fa(a.size()), fb(b.size());
    for (size_t i = 0; i < a.size(); ++i) fa[i] = comparison_forms(a[i], cfg.normalize);
    for (size_t j = 0; j < b.size(); ++j) fb[j] = comparison_forms(b[j], cfg.normalize);

    // Each row writes its own slot; assembly below is serial, so the result
    // does not depend on thread count.
    std::vector<std::vector<ScoredPair>> rows(a.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (size_t i = 0; i < a.size(); ++i) {
        for (size_t j = 0; j < b.size(); ++j) {
            const double s = forms_similarity(fa[i], fb[j]);
            if (s >= cfg.theta) rows[i].push_back({a[i].id, b[j].id, s});
        }
    }

    std::vector<ScoredPair> out;
    for (auto& row : rows)
        out.insert(out.end(), row.begin(), row.end());
    std::sort(out.begin(), out.end(), pair_less);
    return out;
}

Mapping greedy_assign(const std::vector<ScoredPair>& candidates, double theta,
                      const std::vector<EntityRecord>& a,
                      const std::vector<EntityRecord>& b) {
    Mapping m;
    std::set<std::string> used_a, used_b;
    for (const ScoredPair& c : candidates) {
        if (c.score < theta) continue;
        if (used_a.count(c.a_id) || used_b.count(c.b_id)) continue;
        used_a.insert(c.a_id);
        used_b.insert(c.b_id);
        m.pairs.push_back(c);
    }
    for (const auto& e : a)
        if (!used_a.count(e.id)) m.unmatched_a.push_back(e.id);
    for (const auto& e : b)
        if (!used_b.count(e.id)) m.unmatched_b.push_back(e.id);
    return m;
}

} // namespace

double record_similarity(const EntityRecord& a, const EntityRecord& b,
                         const NormalizeOptions& normalize) {
    return forms_similarity(comparison_forms(a, normalize),
                            comparison_forms(b, normalize));
}

std::vector<ScoredPair> score_candidates(const std::vector<EntityRecord>& a,
                                         const std::vector<EntityRecord>& b,
                                         const ResolutionConfig& cfg) {
    return score_grid(a, b, cfg, true);
}

std::vector<ScoredPair> score_candidates_serial(const std::vector<EntityRecord>& a,
                                                const std::vector<EntityRecord>& b,
                                                const ResolutionConfig& cfg) {
    return score_grid(a, b, cfg, false);
}

Mapping resolve(const std::vector<EntityRecord>& a,
                const std::vector<EntityRecord>& b,
                const ResolutionConfig& cfg) {
    return greedy_assign(score_candidates(a, b, cfg), cfg.theta, a, b);
}

PrEval pr_eval_from_counts(size_t correct, size_t predicted, size_t gold) {
    PrEval e;
    e.precision = predicted == 0 ? 0.0 : static_cast<double>(correct) / predicted;
    e.recall = gold == 0 ? 0.0 : static_cast<double>(correct) / gold;
    e.f_measure = (e.precision + e.recall) == 0.0
                      ? 0.0
                      : 2.0 * e.precision * e.recall / (e.precision + e.recall);
    return e;
}

PrEval evaluate_mapping(const Mapping& predicted,
                        const std::vector<std::pair<std::string, std::string>>& gold) {
    std::set<std::pair<std::string, std::string>> gold_set(gold.begin(), gold.end());
    size_t correct = 0;
    for (const auto& p : predicted.pairs)
        correct += gold_set.count({p.a_id, p.b_id});
    return pr_eval_from_counts(correct, predicted.pairs.size(), gold_set.size());
}

std::vector<SweepRow> sweep_threshold(
    const std::vector<EntityRecord>& a, const std::vector<EntityRecord>& b,
    const std::vector<std::pair<std::string, std::string>>& gold,
    std::vector<double> thetas, const NormalizeOptions& normalize) {
    std::vector<SweepRow> rows;
    if (thetas.empty()) return rows;
    std::sort(thetas.begin(), thetas.end());
    ResolutionConfig base{thetas.front(), normalize};
    // One grid pass at the lowest threshold; each row reuses the candidates.
    const auto candidates = score_candidates(a, b, base);
    for (double theta : thetas) {
        if (!(theta >= 0.0 && theta <= 1.0))
            throw ConfigError("theta must lie in [0,1]");
        const Mapping m = greedy_assign(candidates, theta, a, b);
        rows.push_back({theta, evaluate_mapping(m, gold)});
    }
    return rows;
}

} // namespace musekb
