#pragma once

#include <string>
#include <string_view>

namespace musekb {

// Raw gestalt sequence ratio: 2*Km / (|a| + |b|), where Km is the total
// length of recursively matched common substrings (longest common substring
// first, then the same rule on the pieces to its left and right).
//
// Tie-break when several common substrings share the maximal length:
// smallest start in a, then smallest start in b. Because the tie-break is
// oriented by argument order, this raw ratio can differ under argument swap.
//
// Operates on codepoints, not bytes.
double gestalt_ratio(std::u32string_view a, std::u32string_view b);

// Symmetric similarity: the raw ratio evaluated with the two strings in a
// canonical order (lexicographically smaller first), so swapping the
// arguments never changes the result. This orientation rule is part of the
// contract — the brute-force oracle in the tests implements it
// independently and must agree exactly. Both inputs empty -> 1.0 by
// convention (identical strings score 1.0); one empty -> 0.0.
double gestalt_similarity(std::u32string_view a, std::u32string_view b);

// UTF-8 convenience wrapper over gestalt_similarity.
double similarity(std::string_view a, std::string_view b);

} // namespace musekb
