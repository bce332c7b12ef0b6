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

#ifndef GEOPERC_ENSEMBLE_H_
#define GEOPERC_ENSEMBLE_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "geoperc/geogrid.h"
#include "geoperc/ingest.h"
#include "geoperc/lmcore.h"
#include "geoperc/textprep.h"

namespace geoperc {

struct PrepConfig {
  std::size_t stopword_size = 200;
  Count singleton_threshold = 1;

  bool operator==(const PrepConfig &) const = default;
};

struct BuildOptions {
  // Worker threads for per-cell counting; 0 picks the hardware concurrency
  // capped by GEOPERC_THREADS.
  unsigned threads = 0;
  // Recorded verbatim in the manifest. Empty means SOURCE_DATE_EPOCH, or
  // the Unix epoch when that is unset, so builds stay reproducible.
  std::string created;
};

struct CellModel {
  Count posts = 0;
  Vocabulary vocab;
  CellCounts counts;
  DiscountSet discounts;

  bool operator==(const CellModel &) const = default;
};

struct BuildReport {
  Count input_posts = 0;
  Count outside_bbox = 0;
  Count retained_posts = 0;
  Count occupied_cells = 0;
  Count tokens_after_stopwords = 0;
  Count misc_tokens = 0;
  // Mean over cells with at least one token of the per-cell fraction of
  // token occurrences mapped to "<misc>".
  double mean_misc_fraction = 0.0;
  // misc_tokens / tokens_after_stopwords.
  double overall_misc_fraction = 0.0;

  bool operator==(const BuildReport &) const = default;
};

// One language model per occupied grid cell plus everything needed to
// score and rebuild them.
struct ModelEnsemble {
  GridSpec grid;
  EstimatorConfig config;
  PrepConfig prep;
  StopwordSet stopwords;
  // Only cells holding at least one retained post appear here.
  std::map<CellId, CellModel> cells;
  Count total_posts = 0;
  // Retained posts in canonical order; the source for zooming.
  std::vector<Post> posts;
  BuildReport report;
  std::string created;

  Count post_count(CellId cell) const;
  // N(cell) / N(area).
  double prior(CellId cell) const;

  bool operator==(const ModelEnsemble &) const = default;
};

// normalize -> area stopwords -> stopword removal -> per-cell vocabulary
// -> per-cell counts -> per-cell discounts. Posts outside the grid are
// dropped and tallied in the report. Throws empty-corpus when no post lands
// inside the grid.
ModelEnsemble build_ensemble(std::span<const Post> posts, const GridSpec &grid,
                             const EstimatorConfig &cfg, const PrepConfig &prep,
                             const BuildOptions &options = {});

// Posterior over the grid for one query phrase, row-major.
struct HeatMap {
  GridSpec grid;
  std::vector<double> scores;
  // Query tokens after normalization and stopword removal, before the
  // per-cell vocabulary mapping.
  TokenSeq phrase;
  // Set when no occupied cell gives the phrase nonzero likelihood; all
  // scores are then zero.
  bool degenerate = false;

  double score(CellId cell) const { return scores.at(grid.index(cell)); }
};

// Bayes rule over cells in the log domain. `log_likelihoods` and
// `post_counts` are row-major over the grid; cells with zero posts get
// probability zero. Returns all zeros and sets `degenerate` when no cell
// has finite log-likelihood and a nonzero prior.
std::vector<double> bayes_posterior(std::span<const double> log_likelihoods,
                                    std::span<const Count> post_counts, bool &degenerate);

// Throws empty-query if nothing survives preprocessing.
TokenSeq preprocess_query(const ModelEnsemble &ens, std::string_view raw_phrase);

HeatMap posterior(const ModelEnsemble &ens, std::string_view raw_phrase);
// Scores with `cfg` in place of the ensemble's own estimator settings.
HeatMap posterior(const ModelEnsemble &ens, std::string_view raw_phrase,
                  const EstimatorConfig &cfg);

struct RankedCell {
  CellId cell;
  double score = 0.0;

  bool operator==(const RankedCell &) const = default;
};

// Highest scores first, ties by (row, col); cells scoring zero are omitted.
std::vector<RankedCell> top_cells(const HeatMap &map, std::size_t k);

// Rebuilds a rows x cols ensemble over one cell of `parent` from the posts
// located in that cell, re-deriving stopwords on the subset. Throws
// empty-corpus if the cell holds no posts.
ModelEnsemble zoom(std::span<const Post> post_store, const ModelEnsemble &parent, CellId cell,
                   int rows, int cols, const BuildOptions &options = {});
// Uses the parent's own retained posts as the store.
ModelEnsemble zoom(const ModelEnsemble &parent, CellId cell, int rows, int cols,
                   const BuildOptions &options = {});

}  // namespace geoperc

#endif  // GEOPERC_ENSEMBLE_H_
