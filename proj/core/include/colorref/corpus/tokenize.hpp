#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace colorref::corpus {

enum class Language { kEnglish = 0, kChinese = 1 };

std::string to_string(Language lang);
/// "en" or "zh".
Language parse_language(std::string_view text);
/// The model's language flag value.
inline double language_flag(Language lang) { return lang == Language::kChinese ? 1.0 : 0.0; }

/// English: ASCII-lowercased, split on whitespace, punctuation detached,
/// clitics split as in Penn Treebank tokenization ("isn't" -> "is" "n't",
/// "it's" -> "it" "'s"); hyphenated words stay whole.
std::vector<std::string> tokenize_english(std::string_view text);

/// Chinese: greedy longest match against the bundled wordlist, falling back
/// to single characters; runs of Latin script are tokenized as English.
std::vector<std::string> tokenize_chinese(std::string_view text);

std::vector<std::string> tokenize(std::string_view text, Language lang);

/// Joins tokens with single spaces.
std::string join_tokens(const std::vector<std::string>& tokens);

/// True if the UTF-8 string contains a CJK ideograph.
bool contains_cjk(std::string_view text);

/// Decodes UTF-8 into code points; invalid bytes become U+FFFD.
std::u32string decode_utf8(std::string_view text);
std::string encode_utf8(std::u32string_view text);

}  // namespace colorref::corpus
