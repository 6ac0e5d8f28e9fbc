#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "musekb/errors.hpp"

namespace musekb {

// Calendar date as stored in corpus files: ISO-8601 "YYYY-MM-DD", or a bare
// "YYYY" which maps to January 1 with year_only set.
struct Date {
    int year = 0;
    int month = 1;
    int day = 1;
    bool year_only = false;

    static Date parse(std::string_view s);
    std::string str() const;

    bool operator==(const Date&) const = default;
};
bool operator<(const Date& a, const Date& b);
bool operator>=(const Date& a, const Date& b);

enum class Language { En, Es };
enum class DocType { Biography, Review, GenreDescription };
enum class Category { Person, Palo, Location, Work, Other };

std::string to_string(Language v);
std::string to_string(DocType v);
std::string to_string(Category v);
Language language_from(std::string_view s);
DocType doc_type_from(std::string_view s);
Category category_from(std::string_view s);

struct Document {
    std::string id;
    std::string title;
    std::string text;
    Language language = Language::En;
    DocType doc_type = DocType::Biography;
    std::string source;
    std::optional<std::string> group;
    // Empty text is only legal on records explicitly flagged as placeholders.
    bool placeholder = false;
};

struct EntityRecord {
    std::string id;
    std::string label;
    std::vector<std::string> aliases;
    Category category = Category::Other;
    // Keys restricted to attribute_registry().
    std::map<std::string, std::string> attributes;
};

struct Review {
    std::string doc_id;   // the review Document
    std::string album_id;
    double rating = 0.0;  // [0, 5]
    Date review_date;     // >= 1990-01-01
    std::optional<Date> album_release_date;
    std::string genre;
};

struct Album {
    std::string id;
    std::string title;
    std::string artist;
    std::string genre;  // one of genre_registry()
    std::optional<Date> first_release_date;
};

// Documented registry of legal EntityRecord attribute keys.
const std::vector<std::string>& attribute_registry();
// The 16 album genre categories.
const std::vector<std::string>& genre_registry();

enum class Schema { Documents, Entities, Reviews, Albums };
Schema schema_from(std::string_view s);

// Loaders: one JSON record per line, validated. Malformed input raises
// ParseError naming file, line and field; invariant violations (duplicate
// ids, out-of-range values) raise ValidationError.
std::vector<Document> load_documents(const std::string& path);
std::vector<EntityRecord> load_entities(const std::string& path);
std::vector<Review> load_reviews(const std::string& path);
std::vector<Album> load_albums(const std::string& path);

// Emitters write UTF-8, one record per line, fixed field order, so reruns
// are byte-identical.
void save_documents(const std::string& path, const std::vector<Document>& v);
void save_entities(const std::string& path, const std::vector<EntityRecord>& v);
void save_reviews(const std::string& path, const std::vector<Review>& v);
void save_albums(const std::string& path, const std::vector<Album>& v);

std::string to_jsonl(const Document& r);
std::string to_jsonl(const EntityRecord& r);
std::string to_jsonl(const Review& r);
std::string to_jsonl(const Album& r);

// Named-field accessor used by filter_records; unknown field names raise
// ValidationError.
std::string field_value(const Document& r, const std::string& field);
std::string field_value(const EntityRecord& r, const std::string& field);
std::string field_value(const Review& r, const std::string& field);
std::string field_value(const Album& r, const std::string& field);

struct FieldCondition {
    std::string field;
    std::string value;
};

struct GroupCap {
    std::string field;
    size_t cap = 0;
};

// Order-preserving subset: keep records matching every condition; if a cap
// is given, keep at most cap records per distinct value of the cap field,
// earliest first.
template <typename T>
std::vector<T> filter_records(const std::vector<T>& records,
                              const std::vector<FieldCondition>& conditions,
                              const std::optional<GroupCap>& cap = {}) {
    std::vector<T> out;
    std::map<std::string, size_t> taken;
    for (const T& r : records) {
        bool keep = true;
        for (const FieldCondition& c : conditions) {
            if (field_value(r, c.field) != c.value) {
                keep = false;
                break;
            }
        }
        if (!keep) continue;
        if (cap) {
            size_t& n = taken[field_value(r, cap->field)];
            if (n >= cap->cap) continue;
            ++n;
        }
        out.push_back(r);
    }
    return out;
}

} // namespace musekb
