#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "musekb/corpus.hpp"
#include "musekb/linking.hpp"

namespace musekb {

enum class ExtractMethod { TriggerWindow, Parenthetical };
std::string to_string(ExtractMethod m);
ExtractMethod extract_method_from(std::string_view s);

struct VitalRecord {
    std::string subject_id;
    std::optional<std::string> birth_place;  // Location entity id
    std::optional<int> birth_year;           // [1000, 2100]
    std::optional<std::string> death_place;
    std::optional<int> death_year;           // >= birth_year when both present
    ExtractMethod method = ExtractMethod::TriggerWindow;

    bool empty() const {
        return !birth_place && !birth_year && !death_place && !death_year;
    }
};

std::vector<VitalRecord> load_vitals(const std::string& path);
void save_vitals(const std::string& path, const std::vector<VitalRecord>& v);
std::string to_jsonl(const VitalRecord& r);

// Trigger-window extraction: if a language-specific birth trigger ("nació"
// for es, "was born" for en) occurs within the first 250 codepoints, the
// window is linked (NerLocationOnly) and the Location nearest the trigger
// (codepoint gap, ties -> earlier span) becomes birth_place; the minimum
// standalone 4-digit year token in [1000,2100] becomes birth_year.
VitalRecord extract_birth_trigger(const Document& doc, const std::string& subject_id,
                                  const Gazetteer& gazetteer, const Tagger& tagger);

// Grove-style parenthetical extraction from the first sentence:
// "(b Rome, 1525; d Rome, 1594)". Marker tokens b/born and d/died split the
// content into halves; each half takes its first Location annotation
// (exact span matching) and minimum year token.
VitalRecord extract_parenthetical(const Document& doc, const std::string& subject_id,
                                  const Gazetteer& gazetteer);

struct CityFlowRow {
    std::string city;
    long births = 0;
    long deaths = 0;
    // 100*(deaths - births)/births truncated toward zero; absent when
    // births == 0.
    std::optional<int> difference_pct;
};

enum class FlowSort { Births, Deaths };

// Per-city birth/death counts. `labels` maps place entity ids to display
// names (ids are used verbatim when missing). Sorted by the chosen column
// descending, city ascending on ties.
std::vector<CityFlowRow> city_flow(const std::vector<VitalRecord>& records,
                                   const std::map<std::string, std::string>& labels,
                                   FlowSort sort_by = FlowSort::Births);

// Lower median of death years per city, cities with >= min_deaths deaths;
// sorted by median ascending, city ascending.
std::vector<std::pair<std::string, int>> median_death_year(
    const std::vector<VitalRecord>& records,
    const std::map<std::string, std::string>& labels, long min_deaths);

enum class HistField { BirthYear, DeathYear, BirthPlaceProvince };
enum class HistBin { Decade, Year, Province };

struct HistRow {
    std::string bin;
    long count = 0;
};

// Year histograms have deterministic edges (decades start at multiples of
// 10) and include empty bins between min and max; the province histogram
// resolves birth_place through `place_province` (entity id -> province) and
// sorts by count descending, key ascending.
std::vector<HistRow> histogram(const std::vector<VitalRecord>& records,
                               HistField field, HistBin bin,
                               const std::map<std::string, std::string>& place_province = {});

// Field-level evaluation: each present field of each record is one
// (subject, field, value) triple; strict triple matching.
PrEval evaluate_vitals(const std::vector<VitalRecord>& predicted,
                       const std::vector<VitalRecord>& gold);

} // namespace musekb
