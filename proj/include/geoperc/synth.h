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

#ifndef GEOPERC_SYNTH_H_
#define GEOPERC_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "geoperc/geogrid.h"
#include "geoperc/ingest.h"

namespace geoperc {

// Planted-signal corpus. Every cell gets `posts_per_cell` posts made of
// `function_per_post` draws from `function_words` very common words (they
// end up as the area's stopwords) and `content_per_post` draws from a
// `content_words` vocabulary. With probability `history_rate` a post also
// carries the pair "<history> <follower>". The follower is `target` with
// probability `base_target_rate`, or `base_target_rate * planted_factor`
// in the planted cell, and a random content word otherwise, so the bigram
// (history, target) is `planted_factor` times more frequent in the planted
// cell than anywhere else.
struct SynthConfig {
  std::uint64_t seed = 1;
  BBox bbox{40.0, -74.0, 41.0, -73.0};
  int rows = 10;
  int cols = 10;
  int posts_per_cell = 200;
  // Negative row/col picks the planted cell from the seed.
  CellId planted{-1, -1};
  std::string history = "power";
  std::string target = "outage";
  double history_rate = 0.075;
  double base_target_rate = 0.09;
  double planted_factor = 10.0;
  int function_words = 200;
  int function_per_post = 20;
  int content_words = 200;
  int content_per_post = 6;
};

struct SynthCorpus {
  std::vector<Post> posts;
  CellId planted;
  // "<history> <target>", the query that should light up the planted cell.
  std::string phrase;
};

// Deterministic for a given config on every platform.
SynthCorpus generate_planted_corpus(const SynthConfig &config);

}  // namespace geoperc

#endif  // GEOPERC_SYNTH_H_
