#pragma once

#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "musekb/corpus.hpp"

namespace musekb {

struct TermRow {
    std::string term;
    long count = 0;
    double weight = 0.0;  // count / max count within the group
};

struct TermTable {
    std::string group;
    std::vector<TermRow> rows;  // count descending, term ascending on ties
};

// One lowercase word per line; '#' starts a comment. Words are case-folded
// (accents preserved) on load.
std::unordered_set<std::string> load_wordlist(const std::string& path);

// Word frequencies over one document group. Tokens are case-folded surface
// forms (diacritics kept — the tables show display forms); tokens
// containing digits, stopwords, and tokens shorter than min_len codepoints
// are dropped. All docs must share one group label.
TermTable term_frequencies(const std::vector<Document>& docs,
                           const std::unordered_set<std::string>& stopwords,
                           size_t min_len);

// One TermTable per distinct value of `group_field`; documents with an
// empty value raise a validation error listing their ids.
std::map<std::string, TermTable> group_compare(
    const std::vector<Document>& docs, const std::string& group_field,
    const std::unordered_set<std::string>& stopwords, size_t min_len);

} // namespace musekb
