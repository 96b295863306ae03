#include "colorref/corpus/tokenize.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>

#include "colorref/error.hpp"
#include "colorref/resources.hpp"

namespace colorref::corpus {

namespace {

bool is_cjk(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF) || (cp >= 0xF900 && cp <= 0xFAFF) ||
         (cp >= 0x20000 && cp <= 0x2FA1F);
}

// Code points handled by the English tokenizer inside Chinese text.
bool is_latin(char32_t cp) { return cp < 0x80 || (cp >= 0xC0 && cp <= 0x24F); }

bool is_space(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' || cp == 0x3000 || cp == 0xA0;
}

bool is_ascii_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u);
}

constexpr std::array<std::string_view, 6> kClitics = {"'s", "'re", "'ll", "'ve", "'m", "'d"};

bool is_clitic(std::string_view w) {
  return w == "n't" || std::find(kClitics.begin(), kClitics.end(), w) != kClitics.end();
}

// Splits one word (letters, digits, internal hyphens and apostrophes) into
// stem and clitic.
void emit_word(std::string word, std::vector<std::string>& out) {
  if (word.empty()) return;
  if (is_clitic(word)) {
    out.push_back(std::move(word));
    return;
  }
  if (word.size() > 3 && word.ends_with("n't")) {
    out.push_back(word.substr(0, word.size() - 3));
    out.emplace_back("n't");
    return;
  }
  for (auto clitic : kClitics) {
    if (word.size() > clitic.size() && word.ends_with(clitic)) {
      out.push_back(word.substr(0, word.size() - clitic.size()));
      out.emplace_back(clitic);
      return;
    }
  }
  out.push_back(std::move(word));
}

// Tokenizes one whitespace-free chunk.
void tokenize_chunk(std::string_view chunk, std::vector<std::string>& out) {
  // Strip leading and trailing punctuation (including hyphens and
  // apostrophes) one character at a time, keeping clitic tokens intact.
  std::vector<std::string> trailing;
  std::size_t begin = 0;
  std::size_t end = chunk.size();
  auto core = [&] { return chunk.substr(begin, end - begin); };
  while (begin < end && is_ascii_punct(chunk[begin]) && !is_clitic(core())) {
    out.emplace_back(1, chunk[begin]);
    ++begin;
  }
  while (end > begin && is_ascii_punct(chunk[end - 1]) && !is_clitic(core())) {
    trailing.emplace_back(1, chunk[end - 1]);
    --end;
  }
  // Inside the core, punctuation other than hyphen and apostrophe splits.
  std::string word;
  for (std::size_t i = begin; i < end; ++i) {
    const char c = chunk[i];
    if (is_ascii_punct(c) && c != '-' && c != '\'') {
      emit_word(std::move(word), out);
      word.clear();
      out.emplace_back(1, c);
    } else {
      word.push_back(c);
    }
  }
  emit_word(std::move(word), out);
  out.insert(out.end(), trailing.rbegin(), trailing.rend());
}

void tokenize_english_into(std::string_view text, std::vector<std::string>& out) {
  std::string lowered(text);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(), [](unsigned char c) {
    return c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
  });
  std::size_t i = 0;
  while (i < lowered.size()) {
    while (i < lowered.size() && std::isspace(static_cast<unsigned char>(lowered[i]))) ++i;
    std::size_t j = i;
    while (j < lowered.size() && !std::isspace(static_cast<unsigned char>(lowered[j]))) ++j;
    if (j > i) tokenize_chunk(std::string_view(lowered).substr(i, j - i), out);
    i = j;
  }
}

struct Wordlist {
  std::unordered_set<std::u32string> words;
  std::size_t max_len = 1;
};

const Wordlist& zh_wordlist() {
  static const Wordlist list = [] {
    Wordlist w;
    const std::string_view data = bundled_resource("zh_words.txt");
    std::size_t pos = 0;
    while (pos < data.size()) {
      auto nl = data.find('\n', pos);
      if (nl == std::string_view::npos) nl = data.size();
      auto line = data.substr(pos, nl - pos);
      pos = nl + 1;
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      while (!line.empty() && (line.back() == ' ' || line.back() == '\r' || line.back() == '\t')) line.remove_suffix(1);
      while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
      if (line.empty()) continue;
      auto word = decode_utf8(line);
      w.max_len = std::max(w.max_len, word.size());
      w.words.insert(std::move(word));
    }
    return w;
  }();
  return list;
}

void segment_cjk(std::u32string_view run, std::vector<std::string>& out) {
  const auto& list = zh_wordlist();
  std::size_t i = 0;
  while (i < run.size()) {
    std::size_t take = 1;
    for (std::size_t len = std::min(list.max_len, run.size() - i); len > 1; --len) {
      if (list.words.contains(std::u32string(run.substr(i, len)))) {
        take = len;
        break;
      }
    }
    out.push_back(encode_utf8(run.substr(i, take)));
    i += take;
  }
}

}  // namespace

std::string to_string(Language lang) { return lang == Language::kChinese ? "zh" : "en"; }

Language parse_language(std::string_view text) {
  if (text == "en" || text == "english" || text == "English") return Language::kEnglish;
  if (text == "zh" || text == "chinese" || text == "Chinese") return Language::kChinese;
  throw DataError("unknown language '" + std::string(text) + "'");
}

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    char32_t cp = 0xFFFD;
    std::size_t len = 1;
    if (c < 0x80) {
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + len > text.size()) {
      out.push_back(0xFFFD);
      break;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size() * 3);
  for (char32_t cp : text) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

bool contains_cjk(std::string_view text) {
  const auto cps = decode_utf8(text);
  return std::any_of(cps.begin(), cps.end(), is_cjk);
}

std::vector<std::string> tokenize_english(std::string_view text) {
  std::vector<std::string> out;
  tokenize_english_into(text, out);
  return out;
}

std::vector<std::string> tokenize_chinese(std::string_view text) {
  std::vector<std::string> out;
  const auto cps = decode_utf8(text);
  std::size_t i = 0;
  while (i < cps.size()) {
    if (is_space(cps[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    if (is_latin(cps[i])) {
      while (j < cps.size() && is_latin(cps[j])) ++j;
      tokenize_english_into(encode_utf8(std::u32string_view(cps).substr(i, j - i)), out);
    } else {
      while (j < cps.size() && !is_latin(cps[j]) && !is_space(cps[j])) ++j;
      segment_cjk(std::u32string_view(cps).substr(i, j - i), out);
    }
    i = j;
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text, Language lang) {
  return lang == Language::kChinese ? tokenize_chinese(text) : tokenize_english(text);
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace colorref::corpus
