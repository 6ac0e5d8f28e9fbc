#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "musekb/corpus.hpp"
#include "musekb/resolution.hpp"
#include "musekb/text.hpp"

namespace musekb {

struct Span {
    size_t start = 0;  // byte offset into the document text
    size_t end = 0;    // exclusive
    std::string surface;
};

struct Annotation {
    Span span;
    std::string entity_id;
    Category category = Category::Other;  // always the entity's category
};

// The three NER-scoping strategies: disambiguate every gazetteer candidate;
// gate Person and Location candidates on tagger agreement; gate only
// Location candidates.
enum class LinkStrategy { SpansOnly, NerPersonAndLocation, NerLocationOnly };
LinkStrategy strategy_from(std::string_view s);  // spans | ner-pl | ner-l
std::string to_string(LinkStrategy s);

struct NerSpan {
    Span span;
    Category category = Category::Other;  // Person or Location
};

// Pluggable named-entity recognizer. Returned spans must be
// non-overlapping and within text bounds.
class Tagger {
public:
    virtual ~Tagger() = default;
    virtual std::vector<NerSpan> tag(std::string_view text) const = 0;
};

// Built-in rule tagger. Capitalized runs right after the prepositions
// "en"/"in" propose Locations (lowercase connectors de/del/la/las/los/el
// allowed inside the run); capitalized runs opening with an honorific or
// nickname marker (Don, Doña, Niño, ...) propose Persons. Deliberately
// conservative: its recall gaps are what the NER-gated strategies measure.
class RuleTagger : public Tagger {
public:
    std::vector<NerSpan> tag(std::string_view text) const override;
};

struct GazetteerEntry {
    std::string entity_id;
    Category category = Category::Other;
};

// Normalized label/alias index for exact-match candidate detection.
class Gazetteer {
public:
    static Gazetteer build(const std::vector<EntityRecord>& entities,
                           const NormalizeOptions& normalize = {});

    // Token-aligned exact matches of any label or alias. All maximal
    // matches are found; overlaps are resolved longest-match-first, then
    // leftmost. Result is ordered by start offset.
    std::vector<Span> detect_candidates(std::string_view text) const;

    // Entities whose label or alias matches this surface (normalized);
    // empty when unknown.
    const std::vector<GazetteerEntry>* lookup(std::string_view surface) const;

    bool empty() const { return phrases_.empty(); }

private:
    std::string phrase_key(std::string_view surface) const;

    std::unordered_map<std::string, std::vector<GazetteerEntry>> phrases_;
    size_t max_tokens_ = 0;
    NormalizeOptions normalize_;
};

// Link one text: detect candidates, apply the strategy's NER gate, then
// disambiguate each surviving span. Ambiguous surfaces resolve by category
// priority Location > Person > Palo > Work > Other, then smallest entity
// id. The tagger may be null only for SpansOnly.
std::vector<Annotation> link(std::string_view text, const Gazetteer& gazetteer,
                             LinkStrategy strategy, const Tagger* tagger);

// Per-document corpus linking; OpenMP-parallel across documents with the
// serial reference twin used by the equality tests.
std::vector<std::vector<Annotation>> link_corpus(
    const std::vector<Document>& docs, const Gazetteer& gazetteer,
    LinkStrategy strategy, const Tagger* tagger);
std::vector<std::vector<Annotation>> link_corpus_serial(
    const std::vector<Document>& docs, const Gazetteer& gazetteer,
    LinkStrategy strategy, const Tagger* tagger);

// Strict matching: a prediction is correct iff span offsets and entity id
// both equal a gold annotation.
PrEval evaluate_linking(const std::vector<Annotation>& predicted,
                        const std::vector<Annotation>& gold);
// Corpus-level: per-document lists paired positionally (same doc order).
PrEval evaluate_linking(const std::vector<std::vector<Annotation>>& predicted,
                        const std::vector<std::vector<Annotation>>& gold);

} // namespace musekb
