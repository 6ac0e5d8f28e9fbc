#include "musekb/textmine.hpp"

#include <algorithm>
#include <fstream>

#include "musekb/errors.hpp"
#include "musekb/text.hpp"

namespace musekb {

namespace {

// Case-folded surface form, diacritics preserved.
std::string fold_surface(std::string_view s) {
    return normalize(s, {true, false, false});
}

bool has_digit(const std::string& s) {
    for (char c : s)
        if (c >= '0' && c <= '9') return true;
    return false;
}

} // namespace

std::unordered_set<std::string> load_wordlist(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        const size_t b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const size_t e = line.find_last_not_of(" \t");
        words.insert(fold_surface(line.substr(b, e - b + 1)));
    }
    if (in.bad()) throw IoError("error while reading '" + path + "'");
    return words;
}

TermTable term_frequencies(const std::vector<Document>& docs,
                           const std::unordered_set<std::string>& stopwords,
                           size_t min_len) {
    TermTable table;
    if (docs.empty()) return table;
    table.group = docs.front().group.value_or("");
    for (const Document& d : docs)
        if (d.group.value_or("") != table.group)
            throw ValidationError("documents span more than one group ('" +
                                  table.group + "' vs '" + d.group.value_or("") +
                                  "')");

    std::map<std::string, long> counts;
    for (const Document& d : docs) {
        for (const Token& t : tokenize(d.text)) {
            if (has_digit(t.text)) continue;
            const std::string term = fold_surface(t.text);
            if (codepoint_count(term) < min_len) continue;
            if (stopwords.count(term)) continue;
            ++counts[term];
        }
    }
    if (counts.empty()) return table;

    long max_count = 0;
    for (const auto& [term, n] : counts) max_count = std::max(max_count, n);
    table.rows.reserve(counts.size());
    for (const auto& [term, n] : counts)
        table.rows.push_back(
            {term, n, static_cast<double>(n) / static_cast<double>(max_count)});
    std::sort(table.rows.begin(), table.rows.end(),
              [](const TermRow& x, const TermRow& y) {
                  if (x.count != y.count) return x.count > y.count;
                  return x.term < y.term;
              });
    return table;
}

std::map<std::string, TermTable> group_compare(
    const std::vector<Document>& docs, const std::string& group_field,
    const std::unordered_set<std::string>& stopwords, size_t min_len) {
    std::map<std::string, std::vector<Document>> groups;
    std::vector<std::string> missing;
    for (const Document& d : docs) {
        const std::string value = field_value(d, group_field);
        if (value.empty()) {
            missing.push_back(d.id);
            continue;
        }
        groups[value].push_back(d);
    }
    if (!missing.empty()) {
        std::string ids;
        for (const auto& id : missing) {
            if (!ids.empty()) ids += ", ";
            ids += id;
        }
        throw ValidationError("documents missing '" + group_field + "': " + ids);
    }

    std::map<std::string, TermTable> out;
    for (auto& [value, group_docs] : groups) {
        // Group membership is defined by group_field, which may not be the
        // stored group label; recompute frequencies directly.
        std::vector<Document> normalized = group_docs;
        for (Document& d : normalized) d.group = value;
        out[value] = term_frequencies(normalized, stopwords, min_len);
    }
    return out;
}

} // namespace musekb
