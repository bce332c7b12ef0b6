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

#include "geoperc/lmcore.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geoperc/error.h"

namespace geoperc {
namespace {

template <typename V>
V lookup(const TokenMap<V> &map, std::string_view key) {
  auto it = map.find(key);
  return it == map.end() ? V{} : it->second;
}

Error empty_model(const char *what) {
  return DataError("empty-model", std::string("cell has no ") + what);
}

void bump_type_class(HistoryTypeCounts &types, Count old_count, Count new_count) {
  auto slot = [&types](Count c) -> Count * {
    if (c == 1) return &types.n1;
    if (c == 2) return &types.n2;
    if (c >= 3) return &types.n3plus;
    return nullptr;
  };
  if (Count *from = slot(old_count)) --*from;
  if (Count *to = slot(new_count)) ++*to;
}

// Exact rational value num/den, correctly rounded once, clamped to [0, hi].
double clamped_ratio(std::int64_t num, std::int64_t den, double hi) {
  const double value = static_cast<double>(num) / static_cast<double>(den);
  return std::clamp(value, 0.0, hi);
}

}  // namespace

void CellCounts::add_bigram(const Token &prev, const Token &w, Count c) {
  Count &slot = successors_[prev][w];
  const Count old = slot;
  slot += c;
  history_totals_[prev] += c;
  bigram_tokens_ += c;
  bump_type_class(history_types_[prev], old, slot);
  if (old == 0) {
    ++continuation_left_[w];
    ++continuation_total_;
  }
}

CellCounts count_ngrams(std::span<const TokenSeq> docs) {
  CellCounts counts;
  for (const auto &doc : docs) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      ++counts.unigram_[doc[i]];
      ++counts.total_tokens_;
      if (i > 0) counts.add_bigram(doc[i - 1], doc[i], 1);
    }
  }
  return counts;
}

CellCounts CellCounts::from_tables(
    TokenMap<Count> unigram, std::span<const std::pair<std::pair<Token, Token>, Count>> bigrams) {
  CellCounts counts;
  counts.unigram_ = std::move(unigram);
  for (const auto &[token, c] : counts.unigram_) {
    if (c == 0) throw DataError("corrupt-table", "zero unigram count for '" + token + "'");
    counts.total_tokens_ += c;
  }
  for (const auto &[key, c] : bigrams) {
    const auto &[prev, w] = key;
    if (c == 0) throw DataError("corrupt-table", "zero bigram count");
    if (!counts.unigram_.contains(prev) || !counts.unigram_.contains(w)) {
      throw DataError("corrupt-table", "bigram (" + prev + ", " + w + ") has unknown token");
    }
    if (counts.bigram(prev, w) != 0) {
      throw DataError("corrupt-table", "duplicate bigram (" + prev + ", " + w + ")");
    }
    counts.add_bigram(prev, w, c);
  }
  return counts;
}

Count CellCounts::unigram(std::string_view w) const { return lookup(unigram_, w); }

Count CellCounts::bigram(std::string_view prev, std::string_view w) const {
  auto it = successors_.find(prev);
  return it == successors_.end() ? 0 : lookup(it->second, w);
}

Count CellCounts::history_total(std::string_view prev) const {
  return lookup(history_totals_, prev);
}

Count CellCounts::continuation_left(std::string_view w) const {
  return lookup(continuation_left_, w);
}

HistoryTypeCounts CellCounts::history_type_counts(std::string_view prev) const {
  return lookup(history_types_, prev);
}

DiscountSet estimate_discounts(Count n1, Count n2, Count n3, Count n4) {
  DiscountSet d;
  d.n1 = n1;
  d.n2 = n2;
  d.n3 = n3;
  d.n4 = n4;
  const auto i1 = static_cast<std::int64_t>(n1);
  const auto i2 = static_cast<std::int64_t>(n2);
  const auto i3 = static_cast<std::int64_t>(n3);
  const auto i4 = static_cast<std::int64_t>(n4);
  const std::int64_t y = i1 + 2 * i2;

  // Each d_k = k - (k+1) n_{k+1} n1 / (n_k y), folded into one fraction so
  // the result is the correctly rounded rational.
  const std::int64_t den1 = i1 * y;
  d.d1 = den1 == 0 ? kFallbackD1 : clamped_ratio(den1 - 2 * i2 * i1, den1, 1.0);
  const std::int64_t den2 = i2 * y;
  d.d2 = den2 == 0 ? kFallbackD2 : clamped_ratio(2 * den2 - 3 * i3 * i1, den2, 2.0);
  const std::int64_t den3 = i3 * y;
  d.d3 = den3 == 0 ? kFallbackD3 : clamped_ratio(3 * den3 - 4 * i4 * i1, den3, 3.0);
  return d;
}

DiscountSet estimate_discounts(const CellCounts &counts) {
  Count n[5] = {0, 0, 0, 0, 0};
  for (const auto &[prev, next] : counts.successors()) {
    for (const auto &[w, c] : next) {
      if (c >= 1 && c <= 4) ++n[c];
    }
  }
  return estimate_discounts(n[1], n[2], n[3], n[4]);
}

void validate_config(const EstimatorConfig &cfg) {
  if (!(cfg.lambda1 >= 0.0 && cfg.lambda1 <= 1.0)) {
    throw InvalidArgument("lambda1 must lie in [0, 1]");
  }
}

std::string to_string(EstimatorMode mode) {
  switch (mode) {
    case EstimatorMode::kMle: return "mle";
    case EstimatorMode::kInterpolated: return "interpolated";
    case EstimatorMode::kMknPaperLiteral: return "mkn_paper_literal";
    case EstimatorMode::kMknNormalizing: return "mkn_normalizing";
  }
  return "unknown";
}

std::string to_string(UnigramDenominator denominator) {
  return denominator == UnigramDenominator::kTotalTokens ? "total_tokens" : "distinct_tokens";
}

std::string to_string(SingleTokenRule rule) {
  return rule == SingleTokenRule::kContinuation ? "continuation" : "relative_frequency";
}

EstimatorMode parse_estimator_mode(std::string_view text) {
  for (auto mode : {EstimatorMode::kMle, EstimatorMode::kInterpolated,
                    EstimatorMode::kMknPaperLiteral, EstimatorMode::kMknNormalizing}) {
    if (text == to_string(mode)) return mode;
  }
  throw InvalidArgument("unknown estimator mode '" + std::string(text) + "'");
}

UnigramDenominator parse_unigram_denominator(std::string_view text) {
  if (text == "total_tokens") return UnigramDenominator::kTotalTokens;
  if (text == "distinct_tokens") return UnigramDenominator::kDistinctTokens;
  throw InvalidArgument("unknown unigram denominator '" + std::string(text) + "'");
}

SingleTokenRule parse_single_token_rule(std::string_view text) {
  if (text == "continuation") return SingleTokenRule::kContinuation;
  if (text == "relative_frequency") return SingleTokenRule::kRelativeFrequency;
  throw InvalidArgument("unknown single-token rule '" + std::string(text) + "'");
}

double mle_bigram(const CellCounts &counts, std::string_view prev, std::string_view w) {
  const Count history = counts.history_total(prev);
  if (history == 0) return 0.0;
  return static_cast<double>(counts.bigram(prev, w)) / static_cast<double>(history);
}

double interpolated_bigram(const CellCounts &counts, std::string_view prev, std::string_view w,
                           const EstimatorConfig &cfg) {
  if (counts.total_tokens() == 0) throw empty_model("tokens");
  const double denominator = cfg.unigram_denominator == UnigramDenominator::kTotalTokens
                                 ? static_cast<double>(counts.total_tokens())
                                 : static_cast<double>(counts.distinct_tokens());
  const double unigram = static_cast<double>(counts.unigram(w)) / denominator;
  return cfg.lambda1 * mle_bigram(counts, prev, w) + (1.0 - cfg.lambda1) * unigram;
}

double continuation_prob(const CellCounts &counts, std::string_view w) {
  if (counts.continuation_total() == 0) throw empty_model("bigrams");
  return static_cast<double>(counts.continuation_left(w)) /
         static_cast<double>(counts.continuation_total());
}

double mkn_bigram(const CellCounts &counts, const DiscountSet &disc, std::string_view prev,
                  std::string_view w, const EstimatorConfig &cfg) {
  if (counts.total_tokens() == 0) throw empty_model("tokens");
  const double pc = continuation_prob(counts, w);
  const Count history = counts.history_total(prev);
  if (history == 0) return pc;

  const auto h = static_cast<double>(history);
  const Count c = counts.bigram(prev, w);
  const double d = disc.for_count(c);
  const double discounted = std::max(static_cast<double>(c) - d, 0.0) / h;

  const HistoryTypeCounts types = counts.history_type_counts(prev);
  double backoff = 0.0;
  if (cfg.mode == EstimatorMode::kMknPaperLiteral) {
    backoff = d * static_cast<double>(types.distinct()) / h;
  } else {
    backoff = (disc.d1 * static_cast<double>(types.n1) + disc.d2 * static_cast<double>(types.n2) +
               disc.d3 * static_cast<double>(types.n3plus)) /
              h;
  }
  return discounted + backoff * pc;
}

double bigram_prob(const CellCounts &counts, const DiscountSet &disc, std::string_view prev,
                   std::string_view w, const EstimatorConfig &cfg) {
  switch (cfg.mode) {
    case EstimatorMode::kMle: return mle_bigram(counts, prev, w);
    case EstimatorMode::kInterpolated: return interpolated_bigram(counts, prev, w, cfg);
    case EstimatorMode::kMknPaperLiteral:
    case EstimatorMode::kMknNormalizing: return mkn_bigram(counts, disc, prev, w, cfg);
  }
  return 0.0;
}

double phrase_loglik(const CellCounts &counts, const DiscountSet &disc,
                     std::span<const Token> phrase, const EstimatorConfig &cfg) {
  if (phrase.empty()) throw InvalidArgument("phrase must contain at least one token");
  if (phrase.size() == 1) {
    if (cfg.single_token_rule == SingleTokenRule::kContinuation) {
      return std::log(continuation_prob(counts, phrase[0]));
    }
    if (counts.total_tokens() == 0) throw empty_model("tokens");
    return std::log(static_cast<double>(counts.unigram(phrase[0])) /
                    static_cast<double>(counts.total_tokens()));
  }
  double total = 0.0;
  for (std::size_t j = 1; j < phrase.size(); ++j) {
    const double p = bigram_prob(counts, disc, phrase[j - 1], phrase[j], cfg);
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    total += std::log(p);
  }
  return total;
}

}  // namespace geoperc
