#include "musekb/bio.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <tuple>

#include <json.hpp>

#include "musekb/errors.hpp"

namespace musekb {

using json = nlohmann::ordered_json;

namespace {

constexpr size_t kWindowCodepoints = 250;
constexpr int kYearMin = 1000;
constexpr int kYearMax = 2100;

bool is_year_token(const std::string& surface, int& year) {
    if (surface.size() != 4) return false;
    int v = 0;
    for (char c : surface) {
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    if (v < kYearMin || v > kYearMax) return false;
    year = v;
    return true;
}

// Trigger lexicons, as normalized token sequences.
const std::vector<std::vector<std::string>>& triggers_for(Language lang) {
    static const std::vector<std::vector<std::string>> es = {{"nacio"}};
    static const std::vector<std::vector<std::string>> en = {{"was", "born"}};
    return lang == Language::Es ? es : en;
}

// Codepoint offsets of every byte position we might ask about, computed
// lazily over a small window.
size_t byte_to_codepoint(std::string_view window, size_t byte) {
    return codepoint_count(window.substr(0, byte));
}

// Gap between two byte spans in codepoints (0 when they touch or overlap).
size_t span_gap_cp(std::string_view window, size_t a_start, size_t a_end,
                   size_t b_start, size_t b_end) {
    if (a_end <= b_start)
        return byte_to_codepoint(window, b_start) - byte_to_codepoint(window, a_end);
    if (b_end <= a_start)
        return byte_to_codepoint(window, a_start) - byte_to_codepoint(window, b_end);
    return 0;
}

std::optional<int> min_year(const std::vector<Token>& tokens, size_t lo_byte,
                            size_t hi_byte) {
    std::optional<int> best;
    for (const Token& t : tokens) {
        if (t.start < lo_byte || t.end > hi_byte) continue;
        int y = 0;
        if (is_year_token(t.text, y) && (!best || y < *best)) best = y;
    }
    return best;
}

} // namespace

std::string to_string(ExtractMethod m) {
    return m == ExtractMethod::TriggerWindow ? "trigger_window" : "parenthetical";
}

ExtractMethod extract_method_from(std::string_view s) {
    if (s == "trigger_window" || s == "trigger") return ExtractMethod::TriggerWindow;
    if (s == "parenthetical") return ExtractMethod::Parenthetical;
    throw ParseError("unknown extraction method '" + std::string(s) + "'");
}

std::vector<VitalRecord> load_vitals(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::vector<VitalRecord> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": invalid record: " + e.what());
        }
        VitalRecord r;
        auto ctx = [&](const std::string& msg) {
            return path + ":" + std::to_string(lineno) + ": " + msg;
        };
        if (!j.contains("subject_id") || !j["subject_id"].is_string())
            throw ParseError(ctx("field 'subject_id': missing or not a string"));
        r.subject_id = j["subject_id"].get<std::string>();
        auto get_year = [&](const char* field) -> std::optional<int> {
            if (!j.contains(field)) return std::nullopt;
            if (!j[field].is_number_integer())
                throw ParseError(ctx(std::string("field '") + field + "': expected an integer"));
            const int v = j[field].get<int>();
            if (v < kYearMin || v > kYearMax)
                throw ValidationError(ctx(std::string("field '") + field +
                                          "': year outside [1000,2100]"));
            return v;
        };
        auto get_place = [&](const char* field) -> std::optional<std::string> {
            if (!j.contains(field)) return std::nullopt;
            if (!j[field].is_string())
                throw ParseError(ctx(std::string("field '") + field + "': expected a string"));
            return j[field].get<std::string>();
        };
        r.birth_place = get_place("birth_place");
        r.birth_year = get_year("birth_year");
        r.death_place = get_place("death_place");
        r.death_year = get_year("death_year");
        if (r.birth_year && r.death_year && *r.death_year < *r.birth_year)
            throw ValidationError(ctx("death_year precedes birth_year"));
        if (j.contains("method"))
            r.method = extract_method_from(j["method"].get<std::string>());
        out.push_back(std::move(r));
    }
    if (in.bad()) throw IoError("error while reading '" + path + "'");
    return out;
}

void save_vitals(const std::string& path, const std::vector<VitalRecord>& v) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    for (const VitalRecord& r : v) out << to_jsonl(r) << '\n';
    if (!out) throw IoError("error while writing '" + path + "'");
}

std::string to_jsonl(const VitalRecord& r) {
    json j;
    j["subject_id"] = r.subject_id;
    if (r.birth_place) j["birth_place"] = *r.birth_place;
    if (r.birth_year) j["birth_year"] = *r.birth_year;
    if (r.death_place) j["death_place"] = *r.death_place;
    if (r.death_year) j["death_year"] = *r.death_year;
    j["method"] = to_string(r.method);
    return j.dump();
}

VitalRecord extract_birth_trigger(const Document& doc, const std::string& subject_id,
                                  const Gazetteer& gazetteer, const Tagger& tagger) {
    VitalRecord rec;
    rec.subject_id = subject_id;
    rec.method = ExtractMethod::TriggerWindow;

    const std::string_view text = doc.text;
    const size_t window_end = codepoint_to_byte(text, kWindowCodepoints);
    const std::string_view window = text.substr(0, window_end);

    const std::vector<Token> tokens = tokenize(window);
    std::vector<std::string> folded(tokens.size());
    for (size_t i = 0; i < tokens.size(); ++i) folded[i] = fold_token(tokens[i].text);

    // First trigger occurrence inside the window.
    size_t trig_start = 0, trig_end = 0;
    bool found = false;
    for (size_t i = 0; i < tokens.size() && !found; ++i) {
        for (const auto& seq : triggers_for(doc.language)) {
            if (i + seq.size() > tokens.size()) continue;
            bool match = true;
            for (size_t k = 0; k < seq.size(); ++k)
                if (folded[i + k] != seq[k]) {
                    match = false;
                    break;
                }
            if (match) {
                trig_start = tokens[i].start;
                trig_end = tokens[i + seq.size() - 1].end;
                found = true;
                break;
            }
        }
    }
    if (!found) return rec;

    // Nearest Location annotation to the trigger, by codepoint gap.
    std::optional<size_t> best_gap;
    for (const Annotation& a :
         link(window, gazetteer, LinkStrategy::NerLocationOnly, &tagger)) {
        if (a.category != Category::Location) continue;
        const size_t gap = span_gap_cp(window, trig_start, trig_end,
                                       a.span.start, a.span.end);
        if (!best_gap || gap < *best_gap) {
            best_gap = gap;
            rec.birth_place = a.entity_id;
        }
    }

    rec.birth_year = min_year(tokens, 0, window.size());
    return rec;
}

VitalRecord extract_parenthetical(const Document& doc, const std::string& subject_id,
                                  const Gazetteer& gazetteer) {
    VitalRecord rec;
    rec.subject_id = subject_id;
    rec.method = ExtractMethod::Parenthetical;

    const std::string_view text = doc.text;

    // First sentence: up to the first sentence terminator at paren depth 0.
    size_t sentence_end = text.size();
    int depth = 0;
    for (size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '(') ++depth;
        else if (c == ')') depth = std::max(0, depth - 1);
        else if ((c == '.' || c == '!' || c == '?') && depth == 0) {
            sentence_end = i;
            break;
        }
    }

    // First parenthesized segment within that sentence.
    size_t open = std::string_view::npos;
    for (size_t i = 0; i < sentence_end; ++i)
        if (text[i] == '(') {
            open = i;
            break;
        }
    if (open == std::string_view::npos) return rec;
    size_t close = sentence_end;
    depth = 0;
    for (size_t i = open; i < text.size(); ++i) {
        if (text[i] == '(') ++depth;
        else if (text[i] == ')') {
            if (--depth == 0) {
                close = i;
                break;
            }
        }
    }
    const std::string_view content = text.substr(open + 1, close - open - 1);

    // Marker tokens split the content into birth/death halves; separator
    // punctuation (";", dashes) disappears at tokenization.
    const std::vector<Token> tokens = tokenize(content);
    std::vector<std::string> folded(tokens.size());
    for (size_t i = 0; i < tokens.size(); ++i) folded[i] = fold_token(tokens[i].text);

    auto is_birth_marker = [](const std::string& w) { return w == "b" || w == "born"; };
    auto is_death_marker = [](const std::string& w) { return w == "d" || w == "died"; };

    struct Half {
        size_t lo = 0, hi = 0;  // byte range within content
        bool present = false;
    };
    Half birth, death;
    for (size_t i = 0; i < tokens.size(); ++i) {
        Half* h = nullptr;
        if (is_birth_marker(folded[i]) && !birth.present) h = &birth;
        else if (is_death_marker(folded[i]) && !death.present) h = &death;
        if (!h) continue;
        h->present = true;
        h->lo = tokens[i].end;
        h->hi = content.size();
        // Close at the next marker.
        for (size_t k = i + 1; k < tokens.size(); ++k) {
            if (is_birth_marker(folded[k]) || is_death_marker(folded[k])) {
                h->hi = tokens[k].start;
                break;
            }
        }
    }
    if (!birth.present && !death.present) return rec;

    auto fill_half = [&](const Half& h, std::optional<std::string>& place,
                         std::optional<int>& year) {
        if (!h.present || h.lo >= h.hi) return;
        const std::string_view half = content.substr(h.lo, h.hi - h.lo);
        // Exact span matching: the parenthetical register has no prepositional
        // context for the rule tagger, so candidates stand on their own.
        for (const Annotation& a :
             link(half, gazetteer, LinkStrategy::SpansOnly, nullptr)) {
            if (a.category == Category::Location) {
                place = a.entity_id;
                break;  // first (leftmost) Location
            }
        }
        year = min_year(tokenize(half), 0, half.size());
    };
    fill_half(birth, rec.birth_place, rec.birth_year);
    fill_half(death, rec.death_place, rec.death_year);

    // A death year before the birth year is a corrupt parse, not evidence.
    if (rec.birth_year && rec.death_year && *rec.death_year < *rec.birth_year)
        rec.death_year.reset();
    return rec;
}

namespace {

std::string place_name(const std::string& id,
                       const std::map<std::string, std::string>& labels) {
    const auto it = labels.find(id);
    return it == labels.end() ? id : it->second;
}

} // namespace

std::vector<CityFlowRow> city_flow(const std::vector<VitalRecord>& records,
                                   const std::map<std::string, std::string>& labels,
                                   FlowSort sort_by) {
    std::map<std::string, CityFlowRow> by_city;
    for (const VitalRecord& r : records) {
        if (r.birth_place) {
            auto& row = by_city[place_name(*r.birth_place, labels)];
            ++row.births;
        }
        if (r.death_place) {
            auto& row = by_city[place_name(*r.death_place, labels)];
            ++row.deaths;
        }
    }
    std::vector<CityFlowRow> rows;
    rows.reserve(by_city.size());
    for (auto& [city, row] : by_city) {
        row.city = city;
        if (row.births > 0) {
            const double pct =
                100.0 * static_cast<double>(row.deaths - row.births) / row.births;
            row.difference_pct = static_cast<int>(pct);  // truncate toward zero
        }
        rows.push_back(row);
    }
    std::sort(rows.begin(), rows.end(), [&](const CityFlowRow& x, const CityFlowRow& y) {
        const long cx = sort_by == FlowSort::Births ? x.births : x.deaths;
        const long cy = sort_by == FlowSort::Births ? y.births : y.deaths;
        if (cx != cy) return cx > cy;
        return x.city < y.city;
    });
    return rows;
}

std::vector<std::pair<std::string, int>> median_death_year(
    const std::vector<VitalRecord>& records,
    const std::map<std::string, std::string>& labels, long min_deaths) {
    if (min_deaths < 1) throw ConfigError("min_deaths must be >= 1");
    std::map<std::string, std::vector<int>> years;
    for (const VitalRecord& r : records)
        if (r.death_place && r.death_year)
            years[place_name(*r.death_place, labels)].push_back(*r.death_year);
    std::vector<std::pair<std::string, int>> rows;
    for (auto& [city, ys] : years) {
        if (static_cast<long>(ys.size()) < min_deaths) continue;
        std::sort(ys.begin(), ys.end());
        rows.emplace_back(city, ys[(ys.size() - 1) / 2]);  // lower median
    }
    std::sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
        if (x.second != y.second) return x.second < y.second;
        return x.first < y.first;
    });
    return rows;
}

std::vector<HistRow> histogram(const std::vector<VitalRecord>& records,
                               HistField field, HistBin bin,
                               const std::map<std::string, std::string>& place_province) {
    std::vector<HistRow> rows;
    if (field == HistField::BirthPlaceProvince || bin == HistBin::Province) {
        if (field != HistField::BirthPlaceProvince || bin != HistBin::Province)
            throw ConfigError("province binning applies only to birth_place_province");
        std::map<std::string, long> counts;
        for (const VitalRecord& r : records) {
            if (!r.birth_place) continue;
            const auto it = place_province.find(*r.birth_place);
            if (it == place_province.end() || it->second.empty()) continue;
            ++counts[it->second];
        }
        for (const auto& [province, n] : counts) rows.push_back({province, n});
        std::sort(rows.begin(), rows.end(), [](const HistRow& x, const HistRow& y) {
            if (x.count != y.count) return x.count > y.count;
            return x.bin < y.bin;
        });
        return rows;
    }

    std::vector<int> years;
    for (const VitalRecord& r : records) {
        const auto& y = field == HistField::BirthYear ? r.birth_year : r.death_year;
        if (y) years.push_back(*y);
    }
    if (years.empty()) return rows;
    const auto [lo_it, hi_it] = std::minmax_element(years.begin(), years.end());
    if (bin == HistBin::Decade) {
        const int lo = *lo_it / 10 * 10, hi = *hi_it / 10 * 10;
        std::map<int, long> counts;
        for (int d = lo; d <= hi; d += 10) counts[d] = 0;
        for (int y : years) ++counts[y / 10 * 10];
        for (const auto& [decade, n] : counts)
            rows.push_back({std::to_string(decade) + "s", n});
    } else {
        std::map<int, long> counts;
        for (int y = *lo_it; y <= *hi_it; ++y) counts[y] = 0;
        for (int y : years) ++counts[y];
        for (const auto& [year, n] : counts) rows.push_back({std::to_string(year), n});
    }
    return rows;
}

PrEval evaluate_vitals(const std::vector<VitalRecord>& predicted,
                       const std::vector<VitalRecord>& gold) {
    using Triple = std::tuple<std::string, std::string, std::string>;
    auto triples = [](const std::vector<VitalRecord>& records) {
        std::set<Triple> out;
        for (const VitalRecord& r : records) {
            if (r.birth_place) out.insert({r.subject_id, "birth_place", *r.birth_place});
            if (r.birth_year)
                out.insert({r.subject_id, "birth_year", std::to_string(*r.birth_year)});
            if (r.death_place) out.insert({r.subject_id, "death_place", *r.death_place});
            if (r.death_year)
                out.insert({r.subject_id, "death_year", std::to_string(*r.death_year)});
        }
        return out;
    };
    const std::set<Triple> pred = triples(predicted), gold_set = triples(gold);
    size_t correct = 0;
    for (const Triple& t : pred) correct += gold_set.count(t);
    return pr_eval_from_counts(correct, pred.size(), gold_set.size());
}

} // namespace musekb
