#include "musekb/text.hpp"

namespace musekb {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// ASCII base letters for U+00C0..U+017F, case preserved; '.' = no mapping.
// Covers the accented Latin letters that occur in the corpora.
constexpr char kBaseLetter[] =
    "AAAAAA.CEEEEIIIIDNOOOOO.OUUUUY.."
    "aaaaaa.ceeeeiiiidnooooo.ouuuuy.y"
    "AaAaAaCcCcCcCcDdDdEeEeEeEeEeGgGg"
    "GgGgHhHhIiIiIiIiIi..JjKkkLlLlLlL"
    "lLlNnNnNnnNnOoOoOo..RrRrRrSsSsSs"
    "SsTtTtTtUuUuUuUuUuUuWwYyYZzZzZzs";
static_assert(sizeof(kBaseLetter) == 192 + 1);

} // namespace

char32_t utf8_next(std::string_view s, size_t& pos) {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    size_t len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++pos;
        return kReplacement;
    }
    if (pos + len > s.size()) {
        ++pos;
        return kReplacement;
    }
    for (size_t i = 1; i < len; ++i) {
        const auto b = static_cast<unsigned char>(s[pos + i]);
        if ((b & 0xC0) != 0x80) {
            ++pos;
            return kReplacement;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    // Reject overlong encodings and out-of-range values.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++pos;
        return kReplacement;
    }
    pos += len;
    return cp;
}

std::u32string utf8_decode(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    size_t pos = 0;
    while (pos < s.size()) out.push_back(utf8_next(s, pos));
    return out;
}

void utf8_append(std::string& out, char32_t c) {
    if (c < 0x80) {
        out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (c >> 6)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (c >> 12)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (c >> 18)));
        out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
}

std::string utf8_encode(std::u32string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t c : s) utf8_append(out, c);
    return out;
}

size_t codepoint_count(std::string_view s) {
    size_t pos = 0, n = 0;
    while (pos < s.size()) {
        utf8_next(s, pos);
        ++n;
    }
    return n;
}

size_t codepoint_to_byte(std::string_view s, size_t n) {
    size_t pos = 0, seen = 0;
    while (pos < s.size() && seen < n) {
        utf8_next(s, pos);
        ++seen;
    }
    return pos;
}

bool is_letter(char32_t c) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return true;
    if (c == 0xD7 || c == 0xF7) return false; // multiply / divide signs
    return c >= 0xC0 && c <= 0x24F;
}

bool is_ascii_digit(char32_t c) { return c >= '0' && c <= '9'; }

bool is_word_char(char32_t c) { return is_letter(c) || is_ascii_digit(c); }

bool is_space(char32_t c) {
    switch (c) {
        case ' ':
        case '\t':
        case '\n':
        case '\r':
        case '\v':
        case '\f':
        case 0xA0:   // no-break space
        case 0x2028: // line separator
        case 0x2029: // paragraph separator
        case 0x202F: // narrow no-break space
        case 0x3000: // ideographic space
            return true;
        default:
            return c >= 0x2000 && c <= 0x200A;
    }
}

bool is_upper(char32_t c) {
    if (c >= 'A' && c <= 'Z') return true;
    if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return true;
    if (c >= 0x100 && c <= 0x137) return (c & 1) == 0;
    if (c >= 0x139 && c <= 0x147) return (c & 1) == 1;
    if (c >= 0x14A && c <= 0x176) return (c & 1) == 0;
    if (c == 0x178) return true; // Y with diaeresis
    if (c >= 0x179 && c <= 0x17D) return (c & 1) == 1;
    return false;
}

char32_t fold_case(char32_t c) {
    if (c >= 'A' && c <= 'Z') return c + 32;
    if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
    if (c == 0x178) return 0xFF;
    if (is_upper(c)) return c + 1; // Latin Extended-A upper/lower pairs
    return c;
}

char32_t strip_diacritic(char32_t c) {
    if (c >= 0xC0 && c <= 0x17F) {
        const char base = kBaseLetter[c - 0xC0];
        if (base != '.') return static_cast<char32_t>(base);
    }
    return c;
}

std::string normalize(std::string_view text, const NormalizeOptions& opts) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    bool emitted = false;
    size_t pos = 0;
    while (pos < text.size()) {
        char32_t c = utf8_next(text, pos);
        if (opts.collapse_whitespace && is_space(c)) {
            pending_space = true;
            continue;
        }
        if (pending_space && emitted) out.push_back(' ');
        pending_space = false;
        emitted = true;
        if (opts.strip_diacritics) c = strip_diacritic(c);
        if (opts.fold_case) c = fold_case(c);
        utf8_append(out, c);
    }
    return out;
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    size_t pos = 0;
    size_t start = 0;
    bool in_token = false;
    while (pos < text.size()) {
        const size_t at = pos;
        const char32_t c = utf8_next(text, pos);
        if (is_word_char(c)) {
            if (!in_token) {
                start = at;
                in_token = true;
            }
        } else if (in_token) {
            tokens.push_back({start, at, std::string(text.substr(start, at - start))});
            in_token = false;
        }
    }
    if (in_token)
        tokens.push_back({start, text.size(), std::string(text.substr(start))});
    return tokens;
}

std::string fold_token(std::string_view surface) {
    return normalize(surface, {true, true, false});
}

bool first_upper(std::string_view s) {
    if (s.empty()) return false;
    size_t pos = 0;
    return is_upper(utf8_next(s, pos));
}

} // namespace musekb
