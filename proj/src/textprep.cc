// Copyright 2026 The geoperc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "geoperc/textprep.h"

#include <algorithm>
#include <cctype>
#include <cwctype>
#include <locale.h>
#include <map>
#include <utility>
#include <wctype.h>

namespace geoperc {
namespace {

// Character classes come from the C.UTF-8 locale so that Unicode
// punctuation and symbols are handled without an ICU dependency. When the
// locale is missing only ASCII classification is available.
class CharClasses {
 public:
  CharClasses() : locale_(newlocale(LC_CTYPE_MASK, "C.UTF-8", static_cast<locale_t>(0))) {
    if (locale_ == static_cast<locale_t>(0)) {
      locale_ = newlocale(LC_CTYPE_MASK, "C.utf8", static_cast<locale_t>(0));
    }
  }
  ~CharClasses() {
    if (locale_ != static_cast<locale_t>(0)) freelocale(locale_);
  }
  CharClasses(const CharClasses &) = delete;
  CharClasses &operator=(const CharClasses &) = delete;

  bool is_space(char32_t c) const {
    if (c < 0x80) return c == ' ' || (c >= '\t' && c <= '\r');
    return has_locale() && iswspace_l(static_cast<wint_t>(c), locale_);
  }

  // Punctuation, symbols and control characters; everything deleted from
  // token bodies.
  bool is_strippable(char32_t c) const {
    if (c < 0x80) return (c < 0x20) || c == 0x7f || std::ispunct(static_cast<int>(c));
    if (!has_locale()) return false;
    const auto wc = static_cast<wint_t>(c);
    return iswpunct_l(wc, locale_) || iswcntrl_l(wc, locale_);
  }

  char32_t to_lower(char32_t c) const {
    if (c < 0x80) return (c >= 'A' && c <= 'Z') ? c + ('a' - 'A') : c;
    if (!has_locale()) return c;
    return static_cast<char32_t>(towlower_l(static_cast<wint_t>(c), locale_));
  }

 private:
  bool has_locale() const { return locale_ != static_cast<locale_t>(0); }
  locale_t locale_;
};

const CharClasses &char_classes() {
  static const CharClasses classes;
  return classes;
}

// Decodes UTF-8, silently skipping malformed sequences.
std::u32string decode_utf8(std::string_view in) {
  std::u32string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    const auto b0 = static_cast<unsigned char>(in[i]);
    int len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      ++i;
      continue;
    }
    if (i + len > in.size()) break;
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(in[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr char32_t kMinForLength[] = {0, 0, 0x80, 0x800, 0x10000};
    if (!ok || cp < kMinForLength[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

void append_utf8(char32_t cp, std::string &out) {
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

bool starts_with(std::u32string_view s, std::string_view ascii_prefix) {
  if (s.size() < ascii_prefix.size()) return false;
  for (std::size_t i = 0; i < ascii_prefix.size(); ++i) {
    if (s[i] != static_cast<char32_t>(ascii_prefix[i])) return false;
  }
  return true;
}

bool is_url(std::u32string_view word) {
  return starts_with(word, "http://") || starts_with(word, "https://") ||
         starts_with(word, "www.");
}

void emit_token(std::u32string &word, TokenSeq &out) {
  if (word.empty()) return;
  const auto &cc = char_classes();
  if (word.front() != U'#' && word.front() != U'@' && !is_url(word)) {
    std::string token;
    for (char32_t c : word) {
      if (!cc.is_strippable(c)) append_utf8(c, token);
    }
    if (!token.empty()) out.push_back(std::move(token));
  }
  word.clear();
}

std::vector<Token> rank_by_frequency(const std::map<std::string_view, std::uint64_t> &freq,
                                     std::size_t size) {
  std::vector<std::pair<std::string_view, std::uint64_t>> entries(freq.begin(), freq.end());
  // `freq` iterates in token order, so a stable sort on count alone keeps
  // ties lexicographic.
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto &a, const auto &b) { return a.second > b.second; });
  if (entries.size() > size) entries.resize(size);
  std::vector<Token> ranked;
  ranked.reserve(entries.size());
  for (const auto &[token, count] : entries) ranked.emplace_back(token);
  return ranked;
}

}  // namespace

TokenSeq normalize_text(std::string_view raw) {
  const auto &cc = char_classes();
  TokenSeq out;
  std::u32string word;
  for (char32_t c : decode_utf8(raw)) {
    if (cc.is_space(c)) {
      emit_token(word, out);
    } else {
      word.push_back(cc.to_lower(c));
    }
  }
  emit_token(word, out);
  return out;
}

StopwordSet::StopwordSet(std::vector<Token> ranked) {
  for (auto &token : ranked) {
    if (lookup_.insert(token).second) ranked_.push_back(std::move(token));
  }
}

bool StopwordSet::contains(std::string_view token) const { return lookup_.contains(token); }

StopwordSet build_stopwords(std::span<const Token> token_stream, std::size_t size) {
  std::map<std::string_view, std::uint64_t> freq;
  for (const auto &token : token_stream) ++freq[token];
  return StopwordSet(rank_by_frequency(freq, size));
}

StopwordSet build_stopwords(std::span<const TokenSeq> docs, std::size_t size) {
  std::map<std::string_view, std::uint64_t> freq;
  for (const auto &doc : docs) {
    for (const auto &token : doc) ++freq[token];
  }
  return StopwordSet(rank_by_frequency(freq, size));
}

TokenSeq apply_stopwords(std::span<const Token> tokens, const StopwordSet &stops) {
  TokenSeq out;
  out.reserve(tokens.size());
  for (const auto &token : tokens) {
    if (!stops.contains(token)) out.push_back(token);
  }
  return out;
}

Vocabulary::Vocabulary(std::set<Token, std::less<>> kept, std::uint64_t singleton_threshold,
                       double mapped_fraction)
    : kept_(std::move(kept)),
      singleton_threshold_(singleton_threshold),
      mapped_fraction_(mapped_fraction) {}

Token Vocabulary::map(std::string_view token) const {
  return contains(token) ? Token(token) : Token(kMiscToken);
}

TokenSeq Vocabulary::map(std::span<const Token> tokens) const {
  TokenSeq out;
  out.reserve(tokens.size());
  for (const auto &token : tokens) out.push_back(map(token));
  return out;
}

Vocabulary build_vocab(std::span<const TokenSeq> cell_docs, std::uint64_t singleton_threshold) {
  std::map<std::string_view, std::uint64_t> freq;
  std::uint64_t total = 0;
  for (const auto &doc : cell_docs) {
    for (const auto &token : doc) {
      ++freq[token];
      ++total;
    }
  }
  std::set<Token, std::less<>> kept;
  std::uint64_t mapped = 0;
  for (const auto &[token, count] : freq) {
    if (count > singleton_threshold) {
      kept.emplace(token);
    } else {
      mapped += count;
    }
  }
  const double fraction = total == 0 ? 0.0 : static_cast<double>(mapped) / static_cast<double>(total);
  return Vocabulary(std::move(kept), singleton_threshold, fraction);
}

std::vector<Vocabulary> build_vocab(std::span<const std::vector<TokenSeq>> cell_streams,
                                    std::uint64_t singleton_threshold) {
  std::vector<Vocabulary> out;
  out.reserve(cell_streams.size());
  for (const auto &docs : cell_streams) out.push_back(build_vocab(docs, singleton_threshold));
  return out;
}

}  // namespace geoperc
