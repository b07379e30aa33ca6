#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace fedlibre::text {

/// Decodes UTF-8 into code points. Invalid sequences become U+FFFD.
std::u32string decode_utf8(std::string_view s);
void append_utf8(std::string& out, char32_t cp);
std::string encode_utf8(std::u32string_view s);

/// Lowercases and strips diacritics from one code point. The result may be
/// empty (combining marks) or longer than one character ("œ" -> "oe").
void fold_code_point(char32_t cp, std::u32string& out);

/// True for code points that belong inside a word: letters, digits and
/// combining marks. Apostrophes and punctuation separate words.
bool is_word_char(char32_t cp);

/// Case- and diacritic-folded form of `s`, with whitespace runs collapsed to
/// a single space and the ends trimmed. Used for vocabulary matching.
std::string fold(std::string_view s);

std::string_view trim(std::string_view s);

/// Keeps at most `max_chars` code points; if text is cut, it is cut at the
/// last whitespace inside the limit and an ellipsis is appended.
std::string ellipsize(std::string_view s, std::size_t max_chars);

bool starts_with_ci(std::string_view s, std::string_view prefix);

std::string to_lower_ascii(std::string_view s);

std::string url_encode(std::string_view s);
std::string url_decode(std::string_view s, bool plus_as_space = true);

std::vector<std::string> split(std::string_view s, char sep);

} // namespace fedlibre::text
