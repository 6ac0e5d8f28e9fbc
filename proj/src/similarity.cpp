#include "musekb/similarity.hpp"

#include <utility>
#include <vector>

#include "musekb/text.hpp"

namespace musekb {

namespace {

struct Match {
    size_t a = 0, b = 0, size = 0;
};

// Longest common substring of a[alo..ahi) x b[blo..bhi). Scanning both
// indices in ascending order and updating only on strictly greater length
// yields the documented tie-break: smallest start in a, then in b.
Match longest_match(std::u32string_view a, std::u32string_view b,
                    size_t alo, size_t ahi, size_t blo, size_t bhi) {
    Match best{alo, blo, 0};
    const size_t width = bhi - blo;
    std::vector<size_t> prev(width + 1, 0), cur(width + 1, 0);
    for (size_t i = alo; i < ahi; ++i) {
        cur[0] = 0;
        for (size_t j = blo; j < bhi; ++j) {
            const size_t k = j - blo + 1;
            if (a[i] == b[j]) {
                cur[k] = prev[k - 1] + 1;
                if (cur[k] > best.size)
                    best = {i + 1 - cur[k], j + 1 - cur[k], cur[k]};
            } else {
                cur[k] = 0;
            }
        }
        std::swap(prev, cur);
    }
    return best;
}

size_t matched_total(std::u32string_view a, std::u32string_view b,
                     size_t alo, size_t ahi, size_t blo, size_t bhi) {
    if (alo >= ahi || blo >= bhi) return 0;
    const Match m = longest_match(a, b, alo, ahi, blo, bhi);
    if (m.size == 0) return 0;
    return m.size + matched_total(a, b, alo, m.a, blo, m.b) +
           matched_total(a, b, m.a + m.size, ahi, m.b + m.size, bhi);
}

} // namespace

double gestalt_ratio(std::u32string_view a, std::u32string_view b) {
    if (a.empty() && b.empty()) return 1.0;
    const size_t km = matched_total(a, b, 0, a.size(), 0, b.size());
    return 2.0 * static_cast<double>(km) /
           static_cast<double>(a.size() + b.size());
}

double gestalt_similarity(std::u32string_view a, std::u32string_view b) {
    if (b < a) std::swap(a, b);
    return gestalt_ratio(a, b);
}

double similarity(std::string_view a, std::string_view b) {
    return gestalt_similarity(utf8_decode(a), utf8_decode(b));
}

} // namespace musekb
