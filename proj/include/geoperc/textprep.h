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

#ifndef GEOPERC_TEXTPREP_H_
#define GEOPERC_TEXTPREP_H_

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geoperc {

// A normalized word: lowercase, no punctuation, never a URL, hashtag or
// user mention.
using Token = std::string;
using TokenSeq = std::vector<Token>;

inline constexpr std::string_view kMiscToken = "<misc>";

// Lowercases, splits on whitespace, drops URLs ("http://", "https://",
// "www." prefixes), drops whole tokens starting with '#' or '@', then
// deletes the remaining punctuation and symbol characters in place.
// "I-95" becomes "i95". Digits are kept. Invalid UTF-8 bytes are dropped.
TokenSeq normalize_text(std::string_view raw);

class StopwordSet {
 public:
  StopwordSet() = default;
  // `ranked` must already be in rank order; duplicates are ignored.
  explicit StopwordSet(std::vector<Token> ranked);

  bool contains(std::string_view token) const;
  // Rank order: frequency descending, token ascending.
  const std::vector<Token> &ranked() const { return ranked_; }
  std::size_t size() const { return ranked_.size(); }

  bool operator==(const StopwordSet &other) const { return ranked_ == other.ranked_; }

 private:
  std::vector<Token> ranked_;
  std::set<Token, std::less<>> lookup_;
};

// The `size` most frequent tokens of the stream; ties are broken by
// lexicographic token order so the result does not depend on stream order.
StopwordSet build_stopwords(std::span<const Token> token_stream, std::size_t size);
StopwordSet build_stopwords(std::span<const TokenSeq> docs, std::size_t size);

TokenSeq apply_stopwords(std::span<const Token> tokens, const StopwordSet &stops);

// Per-cell vocabulary. Tokens seen more than `singleton_threshold` times in
// the cell are kept, the rest collapse into "<misc>". A threshold of 0
// keeps everything.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::set<Token, std::less<>> kept, std::uint64_t singleton_threshold,
             double mapped_fraction);

  bool contains(std::string_view token) const { return kept_.contains(token); }
  // Returns the token itself when kept, "<misc>" otherwise.
  Token map(std::string_view token) const;
  TokenSeq map(std::span<const Token> tokens) const;

  const std::set<Token, std::less<>> &kept() const { return kept_; }
  std::uint64_t singleton_threshold() const { return singleton_threshold_; }
  // Fraction of the cell's token occurrences that were mapped to "<misc>".
  double mapped_fraction() const { return mapped_fraction_; }

  bool operator==(const Vocabulary &other) const = default;

 private:
  std::set<Token, std::less<>> kept_;
  std::uint64_t singleton_threshold_ = 1;
  double mapped_fraction_ = 0.0;
};

// Builds one cell's vocabulary from all of that cell's (stopword-filtered)
// documents.
Vocabulary build_vocab(std::span<const TokenSeq> cell_docs, std::uint64_t singleton_threshold);

// One vocabulary per cell stream.
std::vector<Vocabulary> build_vocab(std::span<const std::vector<TokenSeq>> cell_streams,
                                    std::uint64_t singleton_threshold);

}  // namespace geoperc

#endif  // GEOPERC_TEXTPREP_H_
