#include "musekb/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace musekb {

using json = nlohmann::ordered_json;

namespace {

bool parse_int(std::string_view s, int& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [p, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && p == last;
}

int days_in_month(int year, int month) {
    static const int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2) {
        const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
        return leap ? 29 : 28;
    }
    return days[month - 1];
}

// File/line context for loader errors.
struct LineCtx {
    const std::string& path;
    size_t lineno = 0;

    [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
        throw ParseError(path + ":" + std::to_string(lineno) + ": field '" +
                         field + "': " + msg);
    }
    [[noreturn]] void invalid(const std::string& msg) const {
        throw ValidationError(path + ":" + std::to_string(lineno) + ": " + msg);
    }

    std::string get_string(const json& j, const std::string& field,
                           bool required_nonempty) const {
        if (!j.contains(field)) fail(field, "missing");
        if (!j[field].is_string()) fail(field, "expected a string");
        std::string v = j[field].get<std::string>();
        if (required_nonempty && v.empty()) fail(field, "must be non-empty");
        return v;
    }
};

template <typename T, typename ParseLine>
std::vector<T> load_jsonl(const std::string& path, ParseLine parse_line) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::vector<T> out;
    std::string line;
    LineCtx ctx{path, 0};
    while (std::getline(in, line)) {
        ++ctx.lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(path + ":" + std::to_string(ctx.lineno) +
                             ": invalid record: " + e.what());
        }
        if (!j.is_object())
            throw ParseError(path + ":" + std::to_string(ctx.lineno) +
                             ": record is not an object");
        out.push_back(parse_line(j, ctx));
    }
    if (in.bad()) throw IoError("error while reading '" + path + "'");
    return out;
}

template <typename T>
void save_jsonl(const std::string& path, const std::vector<T>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    for (const T& r : records) out << to_jsonl(r) << '\n';
    if (!out) throw IoError("error while writing '" + path + "'");
}

Date parse_date_field(const json& j, const std::string& field, const LineCtx& ctx) {
    if (!j.contains(field)) ctx.fail(field, "missing");
    if (!j[field].is_string()) ctx.fail(field, "expected a date string");
    try {
        return Date::parse(j[field].get<std::string>());
    } catch (const ParseError& e) {
        ctx.fail(field, e.what());
    }
}

} // namespace

Date Date::parse(std::string_view s) {
    Date d;
    if (s.size() == 4) {
        if (!parse_int(s, d.year)) throw ParseError("invalid date '" + std::string(s) + "'");
        d.year_only = true;
        return d;
    }
    if (s.size() == 10 && s[4] == '-' && s[7] == '-' &&
        parse_int(s.substr(0, 4), d.year) && parse_int(s.substr(5, 2), d.month) &&
        parse_int(s.substr(8, 2), d.day)) {
        if (d.month < 1 || d.month > 12 || d.day < 1 ||
            d.day > days_in_month(d.year, d.month))
            throw ParseError("invalid calendar date '" + std::string(s) + "'");
        return d;
    }
    throw ParseError("invalid date '" + std::string(s) + "' (expected YYYY-MM-DD or YYYY)");
}

std::string Date::str() const {
    char buf[16];
    if (year_only) {
        std::snprintf(buf, sizeof buf, "%04d", year);
    } else {
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    }
    return buf;
}

bool operator<(const Date& a, const Date& b) {
    if (a.year != b.year) return a.year < b.year;
    if (a.month != b.month) return a.month < b.month;
    return a.day < b.day;
}

bool operator>=(const Date& a, const Date& b) { return !(a < b); }

std::string to_string(Language v) { return v == Language::En ? "en" : "es"; }

std::string to_string(DocType v) {
    switch (v) {
        case DocType::Biography: return "biography";
        case DocType::Review: return "review";
        case DocType::GenreDescription: return "genre_description";
    }
    return {};
}

std::string to_string(Category v) {
    switch (v) {
        case Category::Person: return "Person";
        case Category::Palo: return "Palo";
        case Category::Location: return "Location";
        case Category::Work: return "Work";
        case Category::Other: return "Other";
    }
    return {};
}

Language language_from(std::string_view s) {
    if (s == "en") return Language::En;
    if (s == "es") return Language::Es;
    throw ParseError("unknown language '" + std::string(s) + "' (expected en|es)");
}

DocType doc_type_from(std::string_view s) {
    if (s == "biography") return DocType::Biography;
    if (s == "review") return DocType::Review;
    if (s == "genre_description") return DocType::GenreDescription;
    throw ParseError("unknown doc_type '" + std::string(s) + "'");
}

Category category_from(std::string_view s) {
    if (s == "Person") return Category::Person;
    if (s == "Palo") return Category::Palo;
    if (s == "Location") return Category::Location;
    if (s == "Work") return Category::Work;
    if (s == "Other") return Category::Other;
    throw ParseError("unknown category '" + std::string(s) + "'");
}

const std::vector<std::string>& attribute_registry() {
    static const std::vector<std::string> keys = {
        "birth_year", "birth_place", "death_year", "death_place",
        "province",   "country",     "school",     "role",
        "instrument", "genre",
    };
    return keys;
}

const std::vector<std::string>& genre_registry() {
    static const std::vector<std::string> genres = {
        "Alternative Rock", "Blues",   "Classical", "Country",
        "Dance & Electronic", "Folk",  "Gospel",    "Jazz",
        "Latin Music",      "Metal",   "New Age",   "Pop",
        "R&B",              "Rap & Hip-Hop", "Reggae", "Rock",
    };
    return genres;
}

Schema schema_from(std::string_view s) {
    if (s == "documents") return Schema::Documents;
    if (s == "entities") return Schema::Entities;
    if (s == "reviews") return Schema::Reviews;
    if (s == "albums") return Schema::Albums;
    throw ParseError("unknown schema '" + std::string(s) + "'");
}

std::vector<Document> load_documents(const std::string& path) {
    std::set<std::string> seen;
    auto docs = load_jsonl<Document>(path, [&](const json& j, const LineCtx& ctx) {
        Document d;
        d.id = ctx.get_string(j, "id", true);
        d.title = ctx.get_string(j, "title", false);
        d.text = ctx.get_string(j, "text", false);
        try {
            d.language = language_from(ctx.get_string(j, "language", true));
            d.doc_type = doc_type_from(ctx.get_string(j, "doc_type", true));
        } catch (const ParseError& e) {
            ctx.invalid(e.what());
        }
        d.source = ctx.get_string(j, "source", false);
        if (j.contains("group")) d.group = ctx.get_string(j, "group", false);
        if (j.contains("placeholder")) {
            if (!j["placeholder"].is_boolean()) ctx.fail("placeholder", "expected a boolean");
            d.placeholder = j["placeholder"].get<bool>();
        }
        if (d.text.empty() && !d.placeholder)
            ctx.invalid("document '" + d.id + "' has empty text but is not a placeholder");
        if (!seen.insert(d.id).second)
            ctx.invalid("duplicate document id '" + d.id + "'");
        return d;
    });
    return docs;
}

std::vector<EntityRecord> load_entities(const std::string& path) {
    const auto& registry = attribute_registry();
    std::set<std::string> seen;
    return load_jsonl<EntityRecord>(path, [&](const json& j, const LineCtx& ctx) {
        EntityRecord e;
        e.id = ctx.get_string(j, "id", true);
        e.label = ctx.get_string(j, "label", true);
        if (j.contains("aliases")) {
            if (!j["aliases"].is_array()) ctx.fail("aliases", "expected an array");
            for (const auto& a : j["aliases"]) {
                if (!a.is_string()) ctx.fail("aliases", "expected strings");
                e.aliases.push_back(a.get<std::string>());
            }
        }
        try {
            e.category = category_from(ctx.get_string(j, "category", true));
        } catch (const ParseError& ex) {
            ctx.invalid(ex.what());
        }
        if (j.contains("attributes")) {
            if (!j["attributes"].is_object()) ctx.fail("attributes", "expected an object");
            for (const auto& [k, v] : j["attributes"].items()) {
                if (std::find(registry.begin(), registry.end(), k) == registry.end())
                    ctx.invalid("attribute key '" + k + "' not in the documented registry");
                if (!v.is_string()) ctx.fail("attributes", "value of '" + k + "' must be a string");
                e.attributes[k] = v.get<std::string>();
            }
        }
        if (!seen.insert(e.id).second)
            ctx.invalid("duplicate entity id '" + e.id + "'");
        return e;
    });
}

std::vector<Review> load_reviews(const std::string& path) {
    const Date epoch{1990, 1, 1, false};
    return load_jsonl<Review>(path, [&](const json& j, const LineCtx& ctx) {
        Review r;
        r.doc_id = ctx.get_string(j, "doc_id", true);
        r.album_id = ctx.get_string(j, "album_id", true);
        if (!j.contains("rating")) ctx.fail("rating", "missing");
        if (!j["rating"].is_number()) ctx.fail("rating", "expected a number");
        r.rating = j["rating"].get<double>();
        if (r.rating < 0.0 || r.rating > 5.0)
            ctx.invalid("rating " + std::to_string(r.rating) + " outside [0,5]");
        r.review_date = parse_date_field(j, "review_date", ctx);
        if (!(r.review_date >= epoch))
            ctx.invalid("review_date " + r.review_date.str() + " before 1990-01-01");
        if (j.contains("album_release_date"))
            r.album_release_date = parse_date_field(j, "album_release_date", ctx);
        r.genre = ctx.get_string(j, "genre", true);
        return r;
    });
}

std::vector<Album> load_albums(const std::string& path) {
    const auto& genres = genre_registry();
    return load_jsonl<Album>(path, [&](const json& j, const LineCtx& ctx) {
        Album a;
        a.id = ctx.get_string(j, "id", true);
        a.title = ctx.get_string(j, "title", false);
        a.artist = ctx.get_string(j, "artist", false);
        a.genre = ctx.get_string(j, "genre", true);
        if (std::find(genres.begin(), genres.end(), a.genre) == genres.end())
            ctx.invalid("genre '" + a.genre + "' is not one of the 16 categories");
        if (j.contains("first_release_date"))
            a.first_release_date = parse_date_field(j, "first_release_date", ctx);
        return a;
    });
}

void save_documents(const std::string& path, const std::vector<Document>& v) {
    save_jsonl(path, v);
}
void save_entities(const std::string& path, const std::vector<EntityRecord>& v) {
    save_jsonl(path, v);
}
void save_reviews(const std::string& path, const std::vector<Review>& v) {
    save_jsonl(path, v);
}
void save_albums(const std::string& path, const std::vector<Album>& v) {
    save_jsonl(path, v);
}

std::string to_jsonl(const Document& r) {
    json j;
    j["id"] = r.id;
    j["title"] = r.title;
    j["text"] = r.text;
    j["language"] = to_string(r.language);
    j["doc_type"] = to_string(r.doc_type);
    j["source"] = r.source;
    if (r.group) j["group"] = *r.group;
    if (r.placeholder) j["placeholder"] = true;
    return j.dump();
}

std::string to_jsonl(const EntityRecord& r) {
    json j;
    j["id"] = r.id;
    j["label"] = r.label;
    j["aliases"] = r.aliases;
    j["category"] = to_string(r.category);
    j["attributes"] = json::object();
    for (const auto& [k, v] : r.attributes) j["attributes"][k] = v;
    return j.dump();
}

std::string to_jsonl(const Review& r) {
    json j;
    j["doc_id"] = r.doc_id;
    j["album_id"] = r.album_id;
    j["rating"] = r.rating;
    j["review_date"] = r.review_date.str();
    if (r.album_release_date) j["album_release_date"] = r.album_release_date->str();
    j["genre"] = r.genre;
    return j.dump();
}

std::string to_jsonl(const Album& r) {
    json j;
    j["id"] = r.id;
    j["title"] = r.title;
    j["artist"] = r.artist;
    j["genre"] = r.genre;
    if (r.first_release_date) j["first_release_date"] = r.first_release_date->str();
    return j.dump();
}

std::string field_value(const Document& r, const std::string& field) {
    if (field == "id") return r.id;
    if (field == "title") return r.title;
    if (field == "text") return r.text;
    if (field == "language") return to_string(r.language);
    if (field == "doc_type") return to_string(r.doc_type);
    if (field == "source") return r.source;
    if (field == "group") return r.group.value_or("");
    if (field == "placeholder") return r.placeholder ? "true" : "false";
    throw ValidationError("unknown document field '" + field + "'");
}

std::string field_value(const EntityRecord& r, const std::string& field) {
    if (field == "id") return r.id;
    if (field == "label") return r.label;
    if (field == "category") return to_string(r.category);
    const auto& registry = attribute_registry();
    if (std::find(registry.begin(), registry.end(), field) != registry.end()) {
        auto it = r.attributes.find(field);
        return it == r.attributes.end() ? std::string{} : it->second;
    }
    throw ValidationError("unknown entity field '" + field + "'");
}

std::string field_value(const Review& r, const std::string& field) {
    if (field == "doc_id") return r.doc_id;
    if (field == "album_id") return r.album_id;
    if (field == "genre") return r.genre;
    if (field == "review_date") return r.review_date.str();
    throw ValidationError("unknown review field '" + field + "'");
}

std::string field_value(const Album& r, const std::string& field) {
    if (field == "id") return r.id;
    if (field == "title") return r.title;
    if (field == "artist") return r.artist;
    if (field == "genre") return r.genre;
    throw ValidationError("unknown album field '" + field + "'");
}

} // namespace musekb
