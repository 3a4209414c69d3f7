#ifndef EVIDENCER_TEXT_H_
#define EVIDENCER_TEXT_H_

#include <optional>
#include <string>
#include <string_view>

// UTF-8 helpers. Every offset the engine exposes counts Unicode scalar
// values, never bytes.
namespace evidencer::text {

// Decodes UTF-8. Returns nullopt on malformed input, including surrogates
// and overlong encodings.
std::optional<std::u32string> decode(std::string_view utf8);

// Decodes UTF-8, throwing Error(kParse) on malformed input.
std::u32string decode_or_throw(std::string_view utf8);

std::string encode(std::u32string_view codepoints);

// Simple case folding: ASCII, Latin-1, Latin Extended-A, Greek and Cyrillic
// uppercase letters map to lowercase; everything else is unchanged.
char32_t fold_case(char32_t c);
std::string fold_case(std::string_view utf8);

bool is_space(char32_t c);
bool is_digit(char32_t c);
bool is_upper(char32_t c);
// Letters, digits and any non-ASCII code point that is not whitespace or
// punctuation.
bool is_word_char(char32_t c);

// True if the UTF-8 string contains at least one letter or digit.
bool has_alnum(std::string_view utf8);

}  // namespace evidencer::text

#endif  // EVIDENCER_TEXT_H_
