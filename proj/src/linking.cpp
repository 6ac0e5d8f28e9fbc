#include "musekb/linking.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "musekb/errors.hpp"

namespace musekb {

namespace {

int category_priority(Category c) {
    switch (c) {
        case Category::Location: return 0;
        case Category::Person: return 1;
        case Category::Palo: return 2;
        case Category::Work: return 3;
        case Category::Other: return 4;
    }
    return 5;
}

bool entry_less(const GazetteerEntry& x, const GazetteerEntry& y) {
    const int px = category_priority(x.category), py = category_priority(y.category);
    if (px != py) return px < py;
    return x.entity_id < y.entity_id;
}

bool is_connector(const std::string& folded) {
    static const std::set<std::string> kConnectors = {"de",  "del", "la",
                                                      "las", "los", "el"};
    return kConnectors.count(folded) > 0;
}

bool is_location_trigger(const std::string& folded) {
    return folded == "en" || folded == "in";
}

bool is_person_marker(const std::string& surface) {
    static const std::set<std::string> kMarkers = {
        "Niño", "Niña", "Don", "Doña", "Fray", "Sir", "Lady", "El", "La"};
    return kMarkers.count(surface) > 0;
}

} // namespace

LinkStrategy strategy_from(std::string_view s) {
    if (s == "spans") return LinkStrategy::SpansOnly;
    if (s == "ner-pl") return LinkStrategy::NerPersonAndLocation;
    if (s == "ner-l") return LinkStrategy::NerLocationOnly;
    throw ParseError("unknown strategy '" + std::string(s) +
                     "' (expected spans|ner-pl|ner-l)");
}

std::string to_string(LinkStrategy s) {
    switch (s) {
        case LinkStrategy::SpansOnly: return "spans";
        case LinkStrategy::NerPersonAndLocation: return "ner-pl";
        case LinkStrategy::NerLocationOnly: return "ner-l";
    }
    return {};
}

std::vector<NerSpan> RuleTagger::tag(std::string_view text) const {
    const std::vector<Token> tokens = tokenize(text);
    std::vector<std::string> folded(tokens.size());
    for (size_t i = 0; i < tokens.size(); ++i) folded[i] = fold_token(tokens[i].text);

    std::vector<NerSpan> out;
    size_t i = 0;
    while (i < tokens.size()) {
        if (!first_upper(tokens[i].text)) {
            ++i;
            continue;
        }
        // Location: capitalized run right after "en"/"in", connectors allowed.
        if (i > 0 && is_location_trigger(folded[i - 1])) {
            size_t j = i;
            while (true) {
                size_t k = j + 1;
                while (k < tokens.size() && is_connector(folded[k]) &&
                       !first_upper(tokens[k].text))
                    ++k;
                if (k < tokens.size() && k > j && first_upper(tokens[k].text))
                    j = k;
                else
                    break;
            }
            out.push_back({{tokens[i].start, tokens[j].end,
                            std::string(text.substr(tokens[i].start,
                                                    tokens[j].end - tokens[i].start))},
                           Category::Location});
            i = j + 1;
            continue;
        }
        // Person: marker token followed by at least one capitalized token.
        if (is_person_marker(tokens[i].text) && i + 1 < tokens.size() &&
            first_upper(tokens[i + 1].text)) {
            size_t j = i + 1;
            while (j + 1 < tokens.size() && first_upper(tokens[j + 1].text)) ++j;
            out.push_back({{tokens[i].start, tokens[j].end,
                            std::string(text.substr(tokens[i].start,
                                                    tokens[j].end - tokens[i].start))},
                           Category::Person});
            i = j + 1;
            continue;
        }
        ++i;
    }
    return out;
}

std::string Gazetteer::phrase_key(std::string_view surface) const {
    std::string key;
    for (const Token& t : tokenize(surface)) {
        const std::string f = normalize(t.text, {normalize_.fold_case,
                                                 normalize_.strip_diacritics, false});
        if (f.empty()) continue;
        if (!key.empty()) key.push_back(' ');
        key += f;
    }
    return key;
}

Gazetteer Gazetteer::build(const std::vector<EntityRecord>& entities,
                           const NormalizeOptions& normalize) {
    Gazetteer g;
    g.normalize_ = normalize;
    for (const EntityRecord& e : entities) {
        std::vector<std::string> names = {e.label};
        names.insert(names.end(), e.aliases.begin(), e.aliases.end());
        for (const std::string& name : names) {
            const std::string key = g.phrase_key(name);
            if (key.empty()) continue;
            const size_t n_tokens =
                1 + static_cast<size_t>(std::count(key.begin(), key.end(), ' '));
            g.max_tokens_ = std::max(g.max_tokens_, n_tokens);
            auto& entries = g.phrases_[key];
            const bool present =
                std::any_of(entries.begin(), entries.end(),
                            [&](const GazetteerEntry& x) { return x.entity_id == e.id; });
            if (!present) entries.push_back({e.id, e.category});
        }
    }
    for (auto& [key, entries] : g.phrases_)
        std::sort(entries.begin(), entries.end(), entry_less);
    return g;
}

const std::vector<GazetteerEntry>* Gazetteer::lookup(std::string_view surface) const {
    const auto it = phrases_.find(phrase_key(surface));
    return it == phrases_.end() ? nullptr : &it->second;
}

std::vector<Span> Gazetteer::detect_candidates(std::string_view text) const {
    std::vector<Span> kept;
    if (phrases_.empty()) return kept;

    const std::vector<Token> tokens = tokenize(text);
    std::vector<std::string> folded(tokens.size());
    for (size_t i = 0; i < tokens.size(); ++i)
        folded[i] = normalize(tokens[i].text, {normalize_.fold_case,
                                               normalize_.strip_diacritics, false});

    struct Match {
        size_t start, end;  // byte span
    };
    std::vector<Match> matches;
    for (size_t i = 0; i < tokens.size(); ++i) {
        std::string key;
        for (size_t len = 1; len <= max_tokens_ && i + len <= tokens.size(); ++len) {
            if (len > 1) key.push_back(' ');
            key += folded[i + len - 1];
            if (phrases_.count(key))
                matches.push_back({tokens[i].start, tokens[i + len - 1].end});
        }
    }

    // Longest match first, then leftmost; drop whatever overlaps a winner.
    std::sort(matches.begin(), matches.end(), [](const Match& x, const Match& y) {
        const size_t lx = x.end - x.start, ly = y.end - y.start;
        if (lx != ly) return lx > ly;
        return x.start < y.start;
    });
    std::vector<Match> winners;
    for (const Match& m : matches) {
        const bool clash = std::any_of(
            winners.begin(), winners.end(), [&](const Match& w) {
                return m.start < w.end && w.start < m.end;
            });
        if (!clash) winners.push_back(m);
    }
    std::sort(winners.begin(), winners.end(),
              [](const Match& x, const Match& y) { return x.start < y.start; });

    kept.reserve(winners.size());
    for (const Match& m : winners)
        kept.push_back({m.start, m.end,
                        std::string(text.substr(m.start, m.end - m.start))});
    return kept;
}

std::vector<Annotation> link(std::string_view text, const Gazetteer& gazetteer,
                             LinkStrategy strategy, const Tagger* tagger) {
    if (strategy != LinkStrategy::SpansOnly && tagger == nullptr)
        throw ConfigError("strategy " + to_string(strategy) + " requires a tagger");

    std::set<std::pair<size_t, size_t>> ner_location, ner_person;
    if (strategy != LinkStrategy::SpansOnly) {
        for (const NerSpan& s : tagger->tag(text)) {
            if (s.category == Category::Location)
                ner_location.insert({s.span.start, s.span.end});
            else if (s.category == Category::Person)
                ner_person.insert({s.span.start, s.span.end});
        }
    }

    std::vector<Annotation> out;
    for (const Span& span : gazetteer.detect_candidates(text)) {
        const auto* entries = gazetteer.lookup(span.surface);
        if (!entries) continue;
        const std::pair<size_t, size_t> offsets{span.start, span.end};
        const GazetteerEntry* best = nullptr;
        for (const GazetteerEntry& entry : *entries) {
            bool allowed = true;
            if (entry.category == Category::Location &&
                strategy != LinkStrategy::SpansOnly)
                allowed = ner_location.count(offsets) > 0;
            else if (entry.category == Category::Person &&
                     strategy == LinkStrategy::NerPersonAndLocation)
                allowed = ner_person.count(offsets) > 0;
            if (!allowed) continue;
            // entries are pre-sorted by priority; first allowed wins
            best = &entry;
            break;
        }
        if (best) out.push_back({span, best->entity_id, best->category});
    }
    return out;
}

namespace {

std::vector<std::vector<Annotation>> link_corpus_impl(
    const std::vector<Document>& docs, const Gazetteer& gazetteer,
    LinkStrategy strategy, const Tagger* tagger, bool parallel) {
    if (strategy != LinkStrategy::SpansOnly && tagger == nullptr)
        throw ConfigError("strategy " + to_string(strategy) + " requires a tagger");
    std::vector<std::vector<Annotation>> out(docs.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (size_t i = 0; i < docs.size(); ++i)
        out[i] = link(docs[i].text, gazetteer, strategy, tagger);
    return out;
}

} // namespace

std::vector<std::vector<Annotation>> link_corpus(
    const std::vector<Document>& docs, const Gazetteer& gazetteer,
    LinkStrategy strategy, const Tagger* tagger) {
    return link_corpus_impl(docs, gazetteer, strategy, tagger, true);
}

std::vector<std::vector<Annotation>> link_corpus_serial(
    const std::vector<Document>& docs, const Gazetteer& gazetteer,
    LinkStrategy strategy, const Tagger* tagger) {
    return link_corpus_impl(docs, gazetteer, strategy, tagger, false);
}

PrEval evaluate_linking(const std::vector<Annotation>& predicted,
                        const std::vector<Annotation>& gold) {
    using Key = std::tuple<size_t, size_t, std::string>;
    std::set<Key> gold_set;
    for (const Annotation& a : gold)
        gold_set.insert({a.span.start, a.span.end, a.entity_id});
    size_t correct = 0;
    for (const Annotation& a : predicted)
        correct += gold_set.count({a.span.start, a.span.end, a.entity_id});
    return pr_eval_from_counts(correct, predicted.size(), gold_set.size());
}

PrEval evaluate_linking(const std::vector<std::vector<Annotation>>& predicted,
                        const std::vector<std::vector<Annotation>>& gold) {
    if (predicted.size() != gold.size())
        throw ConfigError("predicted/gold document counts differ");
    size_t correct = 0, n_pred = 0, n_gold = 0;
    for (size_t d = 0; d < predicted.size(); ++d) {
        using Key = std::tuple<size_t, size_t, std::string>;
        std::set<Key> gold_set;
        for (const Annotation& a : gold[d])
            gold_set.insert({a.span.start, a.span.end, a.entity_id});
        for (const Annotation& a : predicted[d])
            correct += gold_set.count({a.span.start, a.span.end, a.entity_id});
        n_pred += predicted[d].size();
        n_gold += gold_set.size();
    }
    return pr_eval_from_counts(correct, n_pred, n_gold);
}

} // namespace musekb
