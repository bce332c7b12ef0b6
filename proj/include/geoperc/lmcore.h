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

#ifndef GEOPERC_LMCORE_H_
#define GEOPERC_LMCORE_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>

#include "geoperc/textprep.h"

namespace geoperc {

using Count = std::uint64_t;

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
};

template <typename V>
using TokenMap = std::unordered_map<Token, V, StringHash, std::equal_to<>>;

// Number of distinct continuations of one history seen exactly once,
// exactly twice, and three or more times.
struct HistoryTypeCounts {
  Count n1 = 0;
  Count n2 = 0;
  Count n3plus = 0;

  Count distinct() const { return n1 + n2 + n3plus; }
  bool operator==(const HistoryTypeCounts &) const = default;
};

// Count tables of one cell. Successor counts are nested under their
// history, so bigram(h, w) is successors.at(h).at(w).
class CellCounts {
 public:
  CellCounts() = default;

  // Rebuilds every derived table from raw unigram and bigram counts.
  // Throws corrupt-table if a bigram mentions a token missing from the
  // unigram table or a count is zero.
  static CellCounts from_tables(TokenMap<Count> unigram,
                                std::span<const std::pair<std::pair<Token, Token>, Count>> bigrams);

  Count unigram(std::string_view w) const;
  Count bigram(std::string_view prev, std::string_view w) const;
  // c(h) as a history: the sum of bigram counts starting with h.
  Count history_total(std::string_view prev) const;
  // Number of distinct histories preceding w.
  Count continuation_left(std::string_view w) const;
  HistoryTypeCounts history_type_counts(std::string_view prev) const;

  const TokenMap<Count> &unigrams() const { return unigram_; }
  const TokenMap<TokenMap<Count>> &successors() const { return successors_; }
  const TokenMap<Count> &history_totals() const { return history_totals_; }
  const TokenMap<Count> &continuation_lefts() const { return continuation_left_; }
  const TokenMap<HistoryTypeCounts> &per_history_type_counts() const { return history_types_; }

  Count total_tokens() const { return total_tokens_; }
  Count distinct_tokens() const { return unigram_.size(); }
  // Number of distinct bigram types.
  Count continuation_total() const { return continuation_total_; }
  Count bigram_tokens() const { return bigram_tokens_; }

  bool operator==(const CellCounts &) const = default;

 private:
  friend CellCounts count_ngrams(std::span<const TokenSeq> docs);
  void add_bigram(const Token &prev, const Token &w, Count c);

  TokenMap<Count> unigram_;
  TokenMap<TokenMap<Count>> successors_;
  TokenMap<Count> history_totals_;
  TokenMap<Count> continuation_left_;
  TokenMap<HistoryTypeCounts> history_types_;
  Count total_tokens_ = 0;
  Count continuation_total_ = 0;
  Count bigram_tokens_ = 0;
};

// Counts unigrams and within-document bigrams. Bigrams never span two
// documents and no boundary markers are added.
CellCounts count_ngrams(std::span<const TokenSeq> docs);

// Count-class discounts and the bigram-type counts n1..n4 they came from.
struct DiscountSet {
  double d1 = 0.5;
  double d2 = 1.0;
  double d3 = 1.5;
  Count n1 = 0;
  Count n2 = 0;
  Count n3 = 0;
  Count n4 = 0;

  // Discount for a bigram seen `count` times; unseen bigrams use d1.
  double for_count(Count count) const {
    if (count >= 3) return d3;
    return count == 2 ? d2 : d1;
  }

  bool operator==(const DiscountSet &) const = default;
};

inline constexpr double kFallbackD1 = 0.5;
inline constexpr double kFallbackD2 = 1.0;
inline constexpr double kFallbackD3 = 1.5;

// Closed-form count-class discounts
//   d1 = 1 - 2 n2 n1 / (n1 (n1 + 2 n2))
//   d2 = 2 - 3 n3 n1 / (n2 (n1 + 2 n2))
//   d3 = 3 - 4 n4 n1 / (n3 (n1 + 2 n2))
// where n_i counts bigram types seen exactly i times. A zero denominator
// selects the fallback (0.5, 1.0, 1.5); each d_k is clamped into [0, k].
DiscountSet estimate_discounts(Count n1, Count n2, Count n3, Count n4);
DiscountSet estimate_discounts(const CellCounts &counts);

enum class EstimatorMode { kMle, kInterpolated, kMknPaperLiteral, kMknNormalizing };
enum class UnigramDenominator { kTotalTokens, kDistinctTokens };
enum class SingleTokenRule { kContinuation, kRelativeFrequency };

struct EstimatorConfig {
  EstimatorMode mode = EstimatorMode::kMknNormalizing;
  // Bigram weight; the unigram gets 1 - lambda1.
  double lambda1 = 0.5;
  UnigramDenominator unigram_denominator = UnigramDenominator::kTotalTokens;
  SingleTokenRule single_token_rule = SingleTokenRule::kContinuation;

  bool operator==(const EstimatorConfig &) const = default;
};

// Throws invalid-argument if lambda1 is outside [0, 1].
void validate_config(const EstimatorConfig &cfg);

std::string to_string(EstimatorMode mode);
std::string to_string(UnigramDenominator denominator);
std::string to_string(SingleTokenRule rule);
EstimatorMode parse_estimator_mode(std::string_view text);
UnigramDenominator parse_unigram_denominator(std::string_view text);
SingleTokenRule parse_single_token_rule(std::string_view text);

// c(prev, w) / c(prev), or 0 when prev never occurs as a history.
double mle_bigram(const CellCounts &counts, std::string_view prev, std::string_view w);

// lambda1 * mle + (1 - lambda1) * c(w) / denominator. Throws empty-model on
// a cell without tokens.
double interpolated_bigram(const CellCounts &counts, std::string_view prev, std::string_view w,
                           const EstimatorConfig &cfg);

// Fraction of distinct bigram types that end in w. Throws empty-model when
// the cell has no bigrams.
double continuation_prob(const CellCounts &counts, std::string_view w);

// Modified Kneser-Ney bigram probability:
//   max(c(prev, w) - d, 0) / c(prev) + backoff(prev) * P_c(w)
// In kMknPaperLiteral the backoff is d * |successors(prev)| / c(prev) with d
// picked by the bigram's own count class. kMknNormalizing uses
// (d1 N1(prev) + d2 N2(prev) + d3 N3+(prev)) / c(prev), which sums to one
// over the vocabulary. A history never seen in the cell backs off to P_c(w).
double mkn_bigram(const CellCounts &counts, const DiscountSet &disc, std::string_view prev,
                  std::string_view w, const EstimatorConfig &cfg);

// Bigram probability under cfg.mode.
double bigram_prob(const CellCounts &counts, const DiscountSet &disc, std::string_view prev,
                   std::string_view w, const EstimatorConfig &cfg);

// Natural-log likelihood of a preprocessed, vocabulary-mapped phrase: the
// sum of log bigram probabilities over adjacent pairs. A one-token phrase
// uses cfg.single_token_rule. Returns -infinity if any factor is zero.
// Throws invalid-argument on an empty phrase.
double phrase_loglik(const CellCounts &counts, const DiscountSet &disc,
                     std::span<const Token> phrase, const EstimatorConfig &cfg);

}  // namespace geoperc

#endif  // GEOPERC_LMCORE_H_
