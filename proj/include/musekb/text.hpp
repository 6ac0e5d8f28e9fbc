#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace musekb {

// UTF-8 <-> UTF-32. Invalid byte sequences decode to U+FFFD one byte at a
// time, so offsets stay aligned with the input.
std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(std::u32string_view s);
void utf8_append(std::string& out, char32_t c);

// Decode the codepoint starting at byte `pos`; advances `pos` past it.
char32_t utf8_next(std::string_view s, size_t& pos);

size_t codepoint_count(std::string_view s);
// Byte offset of the n-th codepoint (clamped to s.size()).
size_t codepoint_to_byte(std::string_view s, size_t n);

// Character classes cover ASCII plus Latin-1 Supplement and Latin
// Extended-A, which is all the corpora here need (Spanish/English).
bool is_letter(char32_t c);
bool is_ascii_digit(char32_t c);
bool is_word_char(char32_t c); // letter or ASCII digit
bool is_space(char32_t c);
bool is_upper(char32_t c);

// Lowercase a single codepoint (ASCII, Latin-1, Latin Extended-A).
char32_t fold_case(char32_t c);
// Map an accented Latin letter to its ASCII base, preserving case
// (A-grave -> A, n-tilde -> n). Identity for everything else.
char32_t strip_diacritic(char32_t c);

struct NormalizeOptions {
    bool fold_case = true;
    bool strip_diacritics = true;
    bool collapse_whitespace = true;
};

// Normalized comparison form used by the matching layers.
std::string normalize(std::string_view text, const NormalizeOptions& opts = {});

struct Token {
    size_t start = 0;  // byte offset into the original text
    size_t end = 0;    // one past the last byte
    std::string text;  // original surface
};

// Maximal runs of word characters, with byte spans into the original text.
std::vector<Token> tokenize(std::string_view text);

// Lowercased, diacritic-stripped form of a single token surface.
std::string fold_token(std::string_view surface);

// True if the first codepoint is an uppercase letter.
bool first_upper(std::string_view s);

} // namespace musekb
