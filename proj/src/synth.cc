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

#include "geoperc/synth.h"

#include <cstdio>
#include <random>

#include "geoperc/error.h"

namespace geoperc {
namespace {

// Fixed arithmetic on top of mt19937_64 so output does not depend on the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t below(std::uint64_t n) { return engine_() % n; }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};

std::string numbered(char prefix, std::uint64_t i) {
  char buffer[24];
  std::snprintf(buffer, sizeof(buffer), "%c%03llu", prefix, static_cast<unsigned long long>(i));
  return buffer;
}

}  // namespace

SynthCorpus generate_planted_corpus(const SynthConfig &config) {
  const GridSpec grid = make_grid(config.bbox, config.rows, config.cols);
  if (config.posts_per_cell < 1 || config.function_words < 1 || config.content_words < 1 ||
      config.function_per_post < 0 || config.content_per_post < 0) {
    throw InvalidArgument("synthetic corpus sizes must be positive");
  }
  const double planted_rate = config.base_target_rate * config.planted_factor;
  if (config.base_target_rate < 0.0 || planted_rate > 1.0 || config.history_rate < 0.0 ||
      config.history_rate > 1.0) {
    throw InvalidArgument("synthetic corpus rates must be probabilities");
  }

  Rng rng(config.seed);
  SynthCorpus corpus;
  corpus.phrase = config.history + " " + config.target;
  corpus.planted = config.planted;
  if (corpus.planted.row < 0 || corpus.planted.col < 0) {
    corpus.planted = grid.cell_at(rng.below(grid.cell_count()));
  } else if (!grid.valid(corpus.planted)) {
    throw InvalidArgument("planted cell outside grid");
  }

  std::uint64_t serial = 0;
  for (std::size_t index = 0; index < grid.cell_count(); ++index) {
    const CellId cell = grid.cell_at(index);
    const BBox box = cell_bbox(grid, cell);
    const double target_rate = cell == corpus.planted ? planted_rate : config.base_target_rate;
    for (int p = 0; p < config.posts_per_cell; ++p) {
      std::vector<std::string> words;
      for (int i = 0; i < config.function_per_post; ++i) {
        words.push_back(numbered('f', rng.below(config.function_words)));
      }
      for (int i = 0; i < config.content_per_post; ++i) {
        words.push_back(numbered('c', rng.below(config.content_words)));
      }
      // Fisher-Yates with the portable generator.
      for (std::size_t i = words.size(); i > 1; --i) std::swap(words[i - 1], words[rng.below(i)]);
      if (rng.chance(config.history_rate)) {
        const std::string follower = rng.chance(target_rate)
                                         ? config.target
                                         : numbered('c', rng.below(config.content_words));
        const auto at = static_cast<std::ptrdiff_t>(rng.below(words.size() + 1));
        words.insert(words.begin() + at, {config.history, follower});
      }

      Post post;
      post.id = "s" + std::to_string(config.seed) + "-" + std::to_string(serial++);
      for (const auto &w : words) {
        if (!post.text.empty()) post.text += ' ';
        post.text += w;
      }
      post.lat = box.min_lat + (0.05 + 0.9 * rng.unit()) * box.height();
      post.lon = box.min_lon + (0.05 + 0.9 * rng.unit()) * box.width();
      post.lang = "en";
      corpus.posts.push_back(std::move(post));
    }
  }
  return corpus;
}

}  // namespace geoperc
