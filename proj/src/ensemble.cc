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

#include "geoperc/ensemble.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <limits>
#include <thread>
#include <utility>

#include "geoperc/error.h"

namespace geoperc {
namespace {

unsigned resolve_threads(unsigned requested) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char *cap = std::getenv("GEOPERC_THREADS")) {
    char *end = nullptr;
    const long value = std::strtol(cap, &end, 10);
    if (end != cap && value >= 1) n = std::min(n, static_cast<unsigned>(value));
  }
  return std::max(1u, n);
}

// Runs fn(i) for i in [0, n). Each index is handled by exactly one worker,
// so writes to distinct slots need no locking.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        try {
          for (std::size_t i = next++; i < n && !failed; i = next++) fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::string format_utc(std::time_t t) {
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

std::string resolve_created(const std::string &requested) {
  if (!requested.empty()) return requested;
  if (const char *epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    char *end = nullptr;
    const long long value = std::strtoll(epoch, &end, 10);
    if (end != epoch && *end == '\0') return format_utc(static_cast<std::time_t>(value));
  }
  return format_utc(0);
}

}  // namespace

Count ModelEnsemble::post_count(CellId cell) const {
  auto it = cells.find(cell);
  return it == cells.end() ? 0 : it->second.posts;
}

double ModelEnsemble::prior(CellId cell) const {
  if (total_posts == 0) return 0.0;
  return static_cast<double>(post_count(cell)) / static_cast<double>(total_posts);
}

ModelEnsemble build_ensemble(std::span<const Post> posts, const GridSpec &grid,
                             const EstimatorConfig &cfg, const PrepConfig &prep,
                             const BuildOptions &options) {
  validate_config(cfg);
  const unsigned threads = resolve_threads(options.threads);

  ModelEnsemble ens;
  ens.grid = grid;
  ens.config = cfg;
  ens.prep = prep;
  ens.created = resolve_created(options.created);
  ens.report.input_posts = posts.size();

  std::vector<std::pair<Post, CellId>> located;
  located.reserve(posts.size());
  for (const auto &post : posts) {
    if (auto cell = locate(grid, post.lat, post.lon)) {
      located.emplace_back(post, *cell);
    } else {
      ++ens.report.outside_bbox;
    }
  }
  if (located.empty()) {
    throw DataError("empty-corpus", "no posts fall inside the grid");
  }
  std::sort(located.begin(), located.end());

  std::vector<TokenSeq> docs(located.size());
  parallel_for(located.size(), threads,
               [&](std::size_t i) { docs[i] = normalize_text(located[i].first.text); });

  ens.stopwords = build_stopwords(std::span<const TokenSeq>(docs), prep.stopword_size);

  std::map<CellId, std::vector<TokenSeq>> by_cell;
  for (std::size_t i = 0; i < located.size(); ++i) {
    by_cell[located[i].second].push_back(apply_stopwords(docs[i], ens.stopwords));
  }

  std::vector<std::pair<CellId, std::vector<TokenSeq>>> work(by_cell.begin(), by_cell.end());
  std::vector<CellModel> models(work.size());
  parallel_for(work.size(), threads, [&](std::size_t i) {
    auto &docs_in_cell = work[i].second;
    CellModel &model = models[i];
    model.posts = docs_in_cell.size();
    model.vocab = build_vocab(docs_in_cell, prep.singleton_threshold);
    for (auto &doc : docs_in_cell) doc = model.vocab.map(doc);
    model.counts = count_ngrams(docs_in_cell);
    model.discounts = estimate_discounts(model.counts);
  });

  double fraction_sum = 0.0;
  Count cells_with_tokens = 0;
  for (std::size_t i = 0; i < work.size(); ++i) {
    const CellModel &model = models[i];
    const Count tokens = model.counts.total_tokens();
    ens.report.tokens_after_stopwords += tokens;
    ens.report.misc_tokens += model.counts.unigram(kMiscToken);
    if (tokens > 0) {
      fraction_sum += model.vocab.mapped_fraction();
      ++cells_with_tokens;
    }
    ens.total_posts += model.posts;
    ens.cells.emplace(work[i].first, std::move(models[i]));
  }

  ens.posts.reserve(located.size());
  for (auto &[post, cell] : located) ens.posts.push_back(std::move(post));

  auto &report = ens.report;
  report.retained_posts = ens.total_posts;
  report.occupied_cells = ens.cells.size();
  report.mean_misc_fraction =
      cells_with_tokens == 0 ? 0.0 : fraction_sum / static_cast<double>(cells_with_tokens);
  report.overall_misc_fraction =
      report.tokens_after_stopwords == 0
          ? 0.0
          : static_cast<double>(report.misc_tokens) /
                static_cast<double>(report.tokens_after_stopwords);
  return ens;
}

std::vector<double> bayes_posterior(std::span<const double> log_likelihoods,
                                    std::span<const Count> post_counts, bool &degenerate) {
  if (log_likelihoods.size() != post_counts.size()) {
    throw InvalidArgument("likelihood and prior vectors differ in length");
  }
  Count total = 0;
  for (Count n : post_counts) total += n;

  const std::size_t n = log_likelihoods.size();
  std::vector<double> joint(n, -std::numeric_limits<double>::infinity());
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (post_counts[i] == 0 || !std::isfinite(log_likelihoods[i])) continue;
    joint[i] = log_likelihoods[i] +
               std::log(static_cast<double>(post_counts[i]) / static_cast<double>(total));
    peak = std::max(peak, joint[i]);
  }

  std::vector<double> scores(n, 0.0);
  degenerate = !std::isfinite(peak);
  if (degenerate) return scores;

  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isfinite(joint[i])) sum += std::exp(joint[i] - peak);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isfinite(joint[i])) scores[i] = std::exp(joint[i] - peak) / sum;
  }
  return scores;
}

TokenSeq preprocess_query(const ModelEnsemble &ens, std::string_view raw_phrase) {
  TokenSeq tokens = apply_stopwords(normalize_text(raw_phrase), ens.stopwords);
  if (tokens.empty()) {
    throw DataError("empty-query", "query phrase is empty after preprocessing");
  }
  return tokens;
}

HeatMap posterior(const ModelEnsemble &ens, std::string_view raw_phrase) {
  return posterior(ens, raw_phrase, ens.config);
}

HeatMap posterior(const ModelEnsemble &ens, std::string_view raw_phrase,
                  const EstimatorConfig &cfg) {
  validate_config(cfg);
  HeatMap map;
  map.grid = ens.grid;
  map.phrase = preprocess_query(ens, raw_phrase);

  const std::size_t n = ens.grid.cell_count();
  std::vector<double> loglik(n, -std::numeric_limits<double>::infinity());
  std::vector<Count> post_counts(n, 0);
  for (const auto &[cell, model] : ens.cells) {
    const std::size_t i = ens.grid.index(cell);
    post_counts[i] = model.posts;
    const TokenSeq mapped = model.vocab.map(map.phrase);
    try {
      loglik[i] = phrase_loglik(model.counts, model.discounts, mapped, cfg);
    } catch (const Error &e) {
      // A cell without tokens or bigrams cannot generate the phrase.
      if (e.code() != "empty-model") throw;
    }
  }
  map.scores = bayes_posterior(loglik, post_counts, map.degenerate);
  return map;
}

std::vector<RankedCell> top_cells(const HeatMap &map, std::size_t k) {
  std::vector<RankedCell> ranked;
  for (std::size_t i = 0; i < map.scores.size(); ++i) {
    if (map.scores[i] > 0.0) ranked.push_back({map.grid.cell_at(i), map.scores[i]});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedCell &a, const RankedCell &b) { return a.score > b.score; });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

ModelEnsemble zoom(std::span<const Post> post_store, const ModelEnsemble &parent, CellId cell,
                   int rows, int cols, const BuildOptions &options) {
  const GridSpec sub_grid = make_grid(cell_bbox(parent.grid, cell), rows, cols);
  std::vector<Post> subset;
  for (const auto &post : post_store) {
    if (locate(parent.grid, post.lat, post.lon) == cell) subset.push_back(post);
  }
  if (subset.empty()) {
    throw DataError("empty-corpus", "cell (" + std::to_string(cell.row) + "," +
                                        std::to_string(cell.col) + ") holds no posts");
  }
  return build_ensemble(subset, sub_grid, parent.config, parent.prep, options);
}

ModelEnsemble zoom(const ModelEnsemble &parent, CellId cell, int rows, int cols,
                   const BuildOptions &options) {
  return zoom(parent.posts, parent, cell, rows, cols, options);
}

}  // namespace geoperc
