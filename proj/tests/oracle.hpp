#pragma once

// Independent reference implementations used to cross-check the library.
// Everything here is deliberately written the naive way (brute-force scans,
// dense matrices) and shares no code with src/ — agreement between the two
// routes is the point of the tests that use them.

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace oracle {

// ---- gestalt similarity ----------------------------------------------

struct SubMatch {
    size_t a = 0, b = 0, len = 0;
};

// All-pairs scan for the longest common substring. Iterating (i, j)
// ascending and keeping only strictly longer matches realizes the
// tie-break: longest, then smallest start in a, then smallest start in b.
inline SubMatch longest_common(std::u32string_view a, std::u32string_view b) {
    SubMatch best;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) {
            size_t len = 0;
            while (i + len < a.size() && j + len < b.size() && a[i + len] == b[j + len])
                ++len;
            if (len > best.len) best = {i, j, len};
        }
    return best;
}

inline size_t matched_chars(std::u32string_view a, std::u32string_view b) {
    if (a.empty() || b.empty()) return 0;
    const SubMatch m = longest_common(a, b);
    if (m.len == 0) return 0;
    return m.len + matched_chars(a.substr(0, m.a), b.substr(0, m.b)) +
           matched_chars(a.substr(m.a + m.len), b.substr(m.b + m.len));
}

inline double gestalt_raw(std::u32string_view a, std::u32string_view b) {
    if (a.empty() && b.empty()) return 1.0;
    return 2.0 * static_cast<double>(matched_chars(a, b)) /
           static_cast<double>(a.size() + b.size());
}

// Canonical orientation: lexicographically smaller string first.
inline double gestalt_similarity(std::u32string_view a, std::u32string_view b) {
    return b < a ? gestalt_raw(b, a) : gestalt_raw(a, b);
}

// ---- greedy injective assignment --------------------------------------

struct AssignedPair {
    std::string a_id, b_id;
    double score = 0.0;
};

// Repeated full scan over the remaining score grid: take the best
// (score desc, a_id asc, b_id asc) cell with score >= theta, retire its row
// and column, repeat.
inline std::vector<AssignedPair> greedy_assign(const std::vector<std::string>& a_ids,
                                               const std::vector<std::string>& b_ids,
                                               const std::vector<std::vector<double>>& score,
                                               double theta) {
    std::vector<bool> used_a(a_ids.size(), false), used_b(b_ids.size(), false);
    std::vector<AssignedPair> out;
    while (true) {
        bool found = false;
        size_t bi = 0, bj = 0;
        for (size_t i = 0; i < a_ids.size(); ++i) {
            if (used_a[i]) continue;
            for (size_t j = 0; j < b_ids.size(); ++j) {
                if (used_b[j]) continue;
                if (score[i][j] < theta) continue;
                if (!found) {
                    found = true;
                    bi = i;
                    bj = j;
                    continue;
                }
                const double s = score[i][j], best = score[bi][bj];
                const bool wins =
                    s > best ||
                    (s == best && (a_ids[i] < a_ids[bi] ||
                                   (a_ids[i] == a_ids[bi] && b_ids[j] < b_ids[bj])));
                if (wins) {
                    bi = i;
                    bj = j;
                }
            }
        }
        if (!found) break;
        out.push_back({a_ids[bi], b_ids[bj], score[bi][bj]});
        used_a[bi] = true;
        used_b[bj] = true;
    }
    return out;
}

// ---- dense eigenvector iterations --------------------------------------

struct DenseRank {
    std::vector<double> scores;
    int iterations = 0;
    bool converged = false;
};

// Replays the same power iteration (uniform start, uniform teleport and
// dangling redistribution, L1 stopping rule) through an explicit dense
// transition matrix.
inline DenseRank dense_pagerank(size_t n,
                                const std::vector<std::tuple<size_t, size_t, double>>& edges,
                                double damping, double tol, int max_iter) {
    std::vector<double> out_weight(n, 0.0);
    for (const auto& [s, d, w] : edges) out_weight[s] += w;
    std::vector<std::vector<double>> P(n, std::vector<double>(n, 0.0));
    for (const auto& [s, d, w] : edges) P[s][d] += w / out_weight[s];

    DenseRank res;
    std::vector<double> x(n, 1.0 / static_cast<double>(n));
    for (int iter = 1; iter <= max_iter; ++iter) {
        std::vector<double> next(n, 0.0);
        double dangling = 0.0;
        for (size_t i = 0; i < n; ++i)
            if (out_weight[i] == 0.0) dangling += x[i];
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) next[j] += x[i] * P[i][j];
        double delta = 0.0;
        for (size_t j = 0; j < n; ++j) {
            next[j] = damping * (next[j] + dangling / static_cast<double>(n)) +
                      (1.0 - damping) / static_cast<double>(n);
            delta += std::abs(next[j] - x[j]);
        }
        x = next;
        res.iterations = iter;
        if (delta < tol) {
            res.converged = true;
            break;
        }
    }
    res.scores = x;
    return res;
}

// Replays the alternating authority/hub half-steps densely with the same
// start, normalization, and stopping rule. (A converged-eigenvector oracle
// would NOT be equivalent: under degenerate dominant eigenvalues the
// iteration's limit depends on the start vector.)
inline std::pair<DenseRank, DenseRank> dense_hits(
    size_t n, const std::vector<std::tuple<size_t, size_t, double>>& edges, double tol,
    int max_iter) {
    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    for (const auto& [s, d, w] : edges) A[s][d] += w;

    const double uniform = 1.0 / std::sqrt(static_cast<double>(n));
    auto normalize = [&](std::vector<double>& v) {
        double ss = 0.0;
        for (double x : v) ss += x * x;
        if (ss == 0.0) {
            for (double& x : v) x = uniform;
            return;
        }
        const double inv = 1.0 / std::sqrt(ss);
        for (double& x : v) x *= inv;
    };

    std::vector<double> a(n, uniform), h(n, uniform);
    DenseRank ra, rh;
    for (int iter = 1; iter <= max_iter; ++iter) {
        std::vector<double> na(n, 0.0), nh(n, 0.0);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) na[j] += A[i][j] * h[i];
        normalize(na);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) nh[i] += A[i][j] * na[j];
        normalize(nh);
        double delta = 0.0;
        for (size_t i = 0; i < n; ++i)
            delta += std::abs(na[i] - a[i]) + std::abs(nh[i] - h[i]);
        a = na;
        h = nh;
        ra.iterations = rh.iterations = iter;
        if (delta < tol) {
            ra.converged = rh.converged = true;
            break;
        }
    }
    ra.scores = a;
    rh.scores = h;
    return {ra, rh};
}

} // namespace oracle
