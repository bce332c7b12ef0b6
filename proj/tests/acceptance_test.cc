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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. An optional argument runs a single criterion by number.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "geoperc/artifacts.h"
#include "geoperc/cli.h"
#include "geoperc/ensemble.h"
#include "geoperc/synth.h"
#include "test_support.h"

namespace geoperc {
namespace {

using testing::flat_bigrams;
using testing::ordered;
using testing::recount;
using testing::TempDir;
using testing::tree_bytes;

struct Outcome {
  bool pass = true;
  std::string detail;
};

EstimatorConfig with_mode(EstimatorMode mode, double lambda1 = 0.5) {
  EstimatorConfig cfg;
  cfg.mode = mode;
  cfg.lambda1 = lambda1;
  return cfg;
}

std::string format(const char *fmt, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), fmt, value);
  return buffer;
}

// Documents totalling `tokens` tokens over `vocab` words with a skewed
// word distribution.
std::vector<TokenSeq> skewed_docs(std::mt19937_64 &rng, std::size_t tokens, std::size_t vocab) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> len(1, 30);
  std::vector<TokenSeq> docs;
  std::size_t used = 0;
  while (used < tokens) {
    TokenSeq doc;
    const std::size_t n = std::min(len(rng), tokens - used);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = unit(rng);
      const auto id = std::min(static_cast<std::size_t>(u * u * u * vocab), vocab - 1);
      doc.push_back("w" + std::to_string(id));
    }
    used += n;
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::string join(const TokenSeq &doc) {
  std::string text;
  for (const auto &t : doc) {
    if (!text.empty()) text += ' ';
    text += t;
  }
  return text;
}

// Posts with uniform coordinates in `bbox`, text drawn from skewed_docs.
std::vector<Post> random_posts(std::mt19937_64 &rng, std::size_t count, const BBox &bbox,
                               std::size_t vocab) {
  std::uniform_real_distribution<double> lat(bbox.min_lat, bbox.max_lat);
  std::uniform_real_distribution<double> lon(bbox.min_lon, bbox.max_lon);
  std::uniform_int_distribution<std::size_t> len(1, 12);
  std::vector<Post> posts;
  for (std::size_t i = 0; i < count; ++i) {
    Post p;
    p.id = "p" + std::to_string(i);
    p.lat = lat(rng);
    p.lon = lon(rng);
    p.text = join(skewed_docs(rng, len(rng), vocab).front());
    posts.push_back(std::move(p));
  }
  return posts;
}

Outcome mkn_normalization() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> tokens(200, 10000), vocab(5, 500);
  const auto cfg = with_mode(EstimatorMode::kMknNormalizing);
  double worst = 0.0;
  std::size_t histories = 0;
  for (int corpus = 0; corpus < 50; ++corpus) {
    const CellCounts c = count_ngrams(skewed_docs(rng, tokens(rng), vocab(rng)));
    const DiscountSet d = estimate_discounts(c);
    for (const auto &[h, total] : c.history_totals()) {
      double sum = 0.0;
      for (const auto &[w, n] : c.unigrams()) sum += mkn_bigram(c, d, h, w, cfg);
      worst = std::max(worst, std::abs(sum - 1.0));
      ++histories;
    }
  }
  return {worst <= 1e-9, std::to_string(histories) + " histories, max |sum-1| = " +
                             format("%.3g", worst)};
}

Outcome continuation_and_mle() {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<std::size_t> tokens(50, 5000), vocab(2, 300);
  double worst_pc = 0.0, worst_mle = 0.0;
  for (int corpus = 0; corpus < 50; ++corpus) {
    const CellCounts c = count_ngrams(skewed_docs(rng, tokens(rng), vocab(rng)));
    if (c.continuation_total() == 0) continue;
    double pc = 0.0;
    for (const auto &[w, n] : c.unigrams()) pc += continuation_prob(c, w);
    worst_pc = std::max(worst_pc, std::abs(pc - 1.0));
    for (const auto &[h, total] : c.history_totals()) {
      double mle = 0.0;
      for (const auto &[w, n] : c.unigrams()) mle += mle_bigram(c, h, w);
      worst_mle = std::max(worst_mle, std::abs(mle - 1.0));
    }
  }
  return {worst_pc <= 1e-12 && worst_mle <= 1e-12,
          "max |sum P_c - 1| = " + format("%.3g", worst_pc) + ", max |sum P_mle - 1| = " +
              format("%.3g", worst_mle)};
}

// Reference discount as a reduced integer fraction converted once.
std::optional<double> reference_discount(int k, std::int64_t nk, std::int64_t nk1, std::int64_t n1,
                                         std::int64_t n2) {
  // d_k = k - (k+1) * Y * n_{k+1} / n_k with Y = n1 / (n1 + 2 n2).
  if (nk == 0 || n1 + 2 * n2 == 0) return std::nullopt;
  std::int64_t num = k * nk * (n1 + 2 * n2) - (k + 1) * n1 * nk1;
  std::int64_t den = nk * (n1 + 2 * n2);
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  num /= g;
  den /= g;
  const double value = static_cast<double>(num) / static_cast<double>(den);
  return std::clamp(value, 0.0, static_cast<double>(k));
}

Outcome discount_formulas() {
  const DiscountSet ones = estimate_discounts(1, 1, 1, 1);
  const DiscountSet mixed = estimate_discounts(4, 2, 2, 1);
  bool pass = ones.d1 == 1.0 / 3.0 && ones.d2 == 1.0 && ones.d3 == 5.0 / 3.0 && mixed.d1 == 0.5 &&
              mixed.d2 == 0.5 && mixed.d3 == 2.0;
  int fallbacks = 0, checked = 0;
  for (std::int64_t n1 = 0; n1 <= 6; ++n1) {
    for (std::int64_t n2 = 0; n2 <= 6; ++n2) {
      for (std::int64_t n3 = 0; n3 <= 6; ++n3) {
        for (std::int64_t n4 = 0; n4 <= 6; ++n4) {
          const DiscountSet d = estimate_discounts(n1, n2, n3, n4);
          const std::int64_t n[5] = {0, n1, n2, n3, n4};
          const double fallback[4] = {0.0, kFallbackD1, kFallbackD2, kFallbackD3};
          const double got[4] = {0.0, d.d1, d.d2, d.d3};
          for (int k = 1; k <= 3; ++k) {
            const auto expected = reference_discount(k, n[k], n[k + 1], n1, n2);
            if (!expected) ++fallbacks;
            pass = pass && got[k] == expected.value_or(fallback[k]);
            ++checked;
          }
        }
      }
    }
  }
  return {pass, "(1,1,1,1) -> (" + format("%.17g", ones.d1) + ", " + format("%g", ones.d2) +
                    ", " + format("%.17g", ones.d3) + "); (4,2,2,1) -> (" +
                    format("%g", mixed.d1) + ", " + format("%g", mixed.d2) + ", " +
                    format("%g", mixed.d3) + "); " + std::to_string(checked) + " checked, " +
                    std::to_string(fallbacks) + " fallbacks"};
}

Outcome hand_computed_c2() {
  std::vector<TokenSeq> docs;
  auto add = [&](TokenSeq doc, int times) {
    for (int i = 0; i < times; ++i) docs.push_back(doc);
  };
  add({"a", "b"}, 1);
  add({"b", "c"}, 2);
  add({"c", "a"}, 3);
  add({"a", "a"}, 4);
  const CellCounts c = count_ngrams(docs);
  const DiscountSet d = estimate_discounts(c);
  const auto cfg = with_mode(EstimatorMode::kMknNormalizing);
  const double pb = mkn_bigram(c, d, "a", "b", cfg);
  const double pa = mkn_bigram(c, d, "a", "a", cfg);
  const double pc = mkn_bigram(c, d, "a", "c", cfg);
  const bool pass =
      std::abs(pb - 0.23333) <= 1e-5 && std::abs(pa - 0.66667) <= 1e-5 && std::abs(pc - 0.1) <= 1e-5;
  return {pass, "P(b|a)=" + format("%.6f", pb) + " P(a|a)=" + format("%.6f", pa) +
                    " P(c|a)=" + format("%.6f", pc)};
}

Outcome count_oracle() {
  std::mt19937_64 rng(505);
  std::uniform_int_distribution<std::size_t> n_posts(1, 1000), vocab(2, 80), side(1, 4);
  std::uniform_int_distribution<std::size_t> len(0, 15);
  std::size_t tables = 0;
  bool pass = true;
  for (int corpus = 0; corpus < 100; ++corpus) {
    const GridSpec grid = make_grid(BBox{0, 0, 1, 1}, static_cast<int>(side(rng)),
                                    static_cast<int>(side(rng)));
    const std::size_t v = vocab(rng);
    std::uniform_real_distribution<double> coord(0.0, 1.0);
    std::vector<Post> posts;
    std::map<CellId, std::vector<TokenSeq>> docs;
    const std::size_t count = n_posts(rng);
    for (std::size_t i = 0; i < count; ++i) {
      Post p;
      p.id = std::to_string(i);
      p.lat = coord(rng);
      p.lon = coord(rng);
      const std::size_t n = len(rng);
      TokenSeq doc = n == 0 ? TokenSeq{} : skewed_docs(rng, n, v).front();
      p.text = doc.empty() ? "..." : join(doc);
      docs[*locate(grid, p.lat, p.lon)].push_back(std::move(doc));
      posts.push_back(std::move(p));
    }
    PrepConfig identity;
    identity.stopword_size = 0;
    identity.singleton_threshold = 0;
    const ModelEnsemble ens = build_ensemble(posts, grid, {}, identity);
    pass = pass && ens.cells.size() == docs.size();
    for (const auto &[cell, cell_docs] : docs) {
      const auto t = recount(cell_docs);
      const CellCounts &c = ens.cells.at(cell).counts;
      pass = pass && ordered(c.unigrams()) == t.unigram && flat_bigrams(c) == t.bigram &&
             c.total_tokens() == t.total_tokens &&
             ordered(c.history_totals()) == t.history_totals &&
             ordered(c.continuation_lefts()) == t.continuation_left &&
             c.continuation_total() == t.continuation_total &&
             ordered(c.per_history_type_counts()) == t.per_history;
      ++tables;
    }
  }
  return {pass, std::to_string(tables) + " cell tables compared"};
}

Outcome posterior_arithmetic() {
  std::mt19937_64 rng(606);
  double worst = 0.0;
  int maps = 0;
  for (int corpus = 0; corpus < 20; ++corpus) {
    const BBox bbox{0, 0, 1, 1};
    const auto posts = random_posts(rng, 400, bbox, 60);
    PrepConfig prep;
    prep.stopword_size = 5;
    for (auto mode : {EstimatorMode::kMknNormalizing, EstimatorMode::kMknPaperLiteral,
                      EstimatorMode::kInterpolated}) {
      const ModelEnsemble ens = build_ensemble(posts, make_grid(bbox, 5, 5), with_mode(mode), prep);
      for (const auto *phrase : {"w10 w11", "w7 w20 w9", "w30", "w1 w2 w3 w4 w5 w6"}) {
        const HeatMap map = posterior(ens, phrase);
        if (map.degenerate) continue;
        const double sum = std::accumulate(map.scores.begin(), map.scores.end(), 0.0);
        worst = std::max(worst, std::abs(sum - 1.0));
        ++maps;
      }
    }
  }

  // Two equally populated cells with P(y|x) = 0.2 and 0.1 under MLE.
  std::vector<Post> posts;
  auto add = [&](double lat, const std::string &text, int times) {
    for (int i = 0; i < times; ++i) posts.push_back(Post{"", text, lat, 0.5, {}, {}});
  };
  add(0.25, "x y", 1);
  add(0.25, "x z", 4);
  add(0.25, "q q", 5);
  add(0.75, "x y", 1);
  add(0.75, "x z", 9);
  PrepConfig identity;
  identity.stopword_size = 0;
  identity.singleton_threshold = 0;
  const ModelEnsemble ens = build_ensemble(posts, make_grid(BBox{0, 0, 1, 1}, 2, 1),
                                           with_mode(EstimatorMode::kMle), identity);
  const HeatMap map = posterior(ens, "x y");
  const double a = map.score({0, 0}), b = map.score({1, 0});
  bool degenerate = false;
  const auto direct = bayes_posterior(std::vector<double>{std::log(0.2), std::log(0.1)},
                                      std::vector<Count>{10, 10}, degenerate);
  const bool pass = worst <= 1e-9 && maps > 0 && std::abs(a - 2.0 / 3.0) <= 1e-12 &&
                    std::abs(b - 1.0 / 3.0) <= 1e-12 &&
                    std::abs(direct[0] - 2.0 / 3.0) <= 1e-12 &&
                    std::abs(direct[1] - 1.0 / 3.0) <= 1e-12;
  return {pass, std::to_string(maps) + " maps, max |sum-1| = " + format("%.3g", worst) +
                    "; two-cell = " + format("%.15f", a) + " / " + format("%.15f", b)};
}

Outcome planted_signal() {
  int hits_normalizing = 0, hits_literal = 0;
  const int seeds = 100;
  for (int seed = 1; seed <= seeds; ++seed) {
    SynthConfig config;
    config.seed = static_cast<std::uint64_t>(seed);
    const SynthCorpus corpus = generate_planted_corpus(config);
    const ModelEnsemble ens = build_ensemble(
        corpus.posts, make_grid(config.bbox, config.rows, config.cols), {}, {});
    const auto normalizing =
        top_cells(posterior(ens, corpus.phrase, with_mode(EstimatorMode::kMknNormalizing)), 1);
    const auto literal =
        top_cells(posterior(ens, corpus.phrase, with_mode(EstimatorMode::kMknPaperLiteral)), 1);
    if (!normalizing.empty() && normalizing[0].cell == corpus.planted) ++hits_normalizing;
    if (!literal.empty() && literal[0].cell == corpus.planted) ++hits_literal;
  }
  return {hits_normalizing >= 95 && hits_literal >= 95,
          "top-1 hits: normalizing " + std::to_string(hits_normalizing) + "/100, paper-literal " +
              std::to_string(hits_literal) + "/100"};
}

Outcome bigram_context() {
  // Cell A loves driving and hates cooking; cell B the reverse.
  std::vector<Post> posts;
  auto add = [&](double lat, const std::string &text) {
    posts.push_back(Post{"", text, lat, 0.5, {}, {}});
  };
  for (int i = 0; i < 10; ++i) {
    add(0.25, "i love driving");
    add(0.25, "i hate cooking");
    add(0.75, "i hate driving");
    add(0.75, "i love cooking");
  }
  PrepConfig prep;
  prep.stopword_size = 0;
  const GridSpec grid = make_grid(BBox{0, 0, 1, 1}, 2, 1);
  bool pass = true;
  std::string detail;
  for (auto mode : {EstimatorMode::kMknNormalizing, EstimatorMode::kMknPaperLiteral}) {
    const ModelEnsemble ens = build_ensemble(posts, grid, with_mode(mode), prep);
    const auto top = top_cells(posterior(ens, "love driving"), 1);
    pass = pass && !top.empty() && top[0].cell == CellId{0, 0};
    detail += to_string(mode) + " argmax (" +
              (top.empty() ? std::string("none")
                           : std::to_string(top[0].cell.row) + "," + std::to_string(top[0].cell.col)) +
              " " + format("%.4f", top.empty() ? 0.0 : top[0].score) + "); ";
  }
  // Unigram-only scoring: the interpolated estimator with no bigram weight.
  const ModelEnsemble unigram =
      build_ensemble(posts, grid, with_mode(EstimatorMode::kInterpolated, 0.0), prep);
  const HeatMap flat = posterior(unigram, "love driving");
  const double gap = std::abs(flat.score({0, 0}) - flat.score({1, 0}));
  pass = pass && gap < 1e-12;
  return {pass, detail + "unigram gap " + format("%.3g", gap)};
}

Outcome zoom_equivalence() {
  std::mt19937_64 rng(909);
  std::uniform_int_distribution<int> side(1, 6), sub(1, 8);
  std::uniform_int_distribution<std::size_t> n_posts(20, 600);
  int compared = 0;
  bool pass = true;
  for (int corpus = 0; corpus < 20; ++corpus) {
    const BBox bbox{40.0 + corpus * 0.01, -74.0, 40.5, -73.3};
    const auto posts = random_posts(rng, n_posts(rng), bbox, 120);
    PrepConfig prep;
    prep.stopword_size = 10;
    const GridSpec grid = make_grid(bbox, side(rng), side(rng));
    const ModelEnsemble built =
        build_ensemble(posts, grid, {}, prep, BuildOptions{0, "2026-03-04T05:06:07Z"});
    TempDir parent_dir("acc-parent");
    save_model(built, parent_dir.path());
    const ModelEnsemble parent = load_model(parent_dir.path());

    std::vector<CellId> occupied;
    for (const auto &[cell, model] : parent.cells) occupied.push_back(cell);
    const CellId cell = occupied[rng() % occupied.size()];
    const int rows = sub(rng), cols = sub(rng);

    const ModelEnsemble zoomed = zoom(parent, cell, rows, cols, BuildOptions{0, parent.created});
    std::vector<Post> subset;
    for (const auto &p : posts) {
      if (locate(grid, p.lat, p.lon) == cell) subset.push_back(p);
    }
    const ModelEnsemble direct = build_ensemble(subset, make_grid(cell_bbox(grid, cell), rows, cols),
                                                {}, prep, BuildOptions{0, parent.created});
    TempDir a("acc-zoom"), b("acc-direct");
    save_model(zoomed, a.path());
    save_model(direct, b.path());
    pass = pass && tree_bytes(a.path()) == tree_bytes(b.path());
    ++compared;
  }
  return {pass, std::to_string(compared) + " zoomed models compared byte for byte"};
}

std::string renderings(const ModelEnsemble &ens, const std::string &phrase) {
  const HeatMap map = posterior(ens, phrase);
  return heatmap_geojson(map).dump() + heatmap_image(map, ColorRamp::default_ramp(), 3) +
         heatmap_ascii(map);
}

Outcome round_trip() {
  std::mt19937_64 rng(1010);
  bool lossless = true, identical = true;
  for (int corpus = 0; corpus < 10; ++corpus) {
    const BBox bbox{0, 0, 1, 1};
    const auto posts = random_posts(rng, 300, bbox, 80);
    PrepConfig prep;
    prep.stopword_size = 8;
    const GridSpec grid = make_grid(bbox, 4, 3);
    const ModelEnsemble first = build_ensemble(posts, grid, {}, prep);
    std::vector<Post> reversed(posts.rbegin(), posts.rend());
    const ModelEnsemble second = build_ensemble(reversed, grid, {}, prep, BuildOptions{1, ""});
    TempDir a("acc-rt-a"), b("acc-rt-b");
    save_model(first, a.path());
    save_model(second, b.path());
    identical = identical && tree_bytes(a.path()) == tree_bytes(b.path());
    const ModelEnsemble loaded = load_model(a.path());
    lossless = lossless && loaded == first;
    for (const auto *phrase : {"w30 w31", "w20 w50 w21", "w60"}) {
      identical = identical && renderings(first, phrase) == renderings(loaded, phrase) &&
                  renderings(first, phrase) == renderings(second, phrase);
    }
  }

  // The same argv twice through the command line.
  TempDir dir("acc-cli");
  auto call = [](std::vector<std::string> args) {
    args.insert(args.begin(), "geoperc");
    std::vector<const char *> argv;
    for (const auto &s : args) argv.push_back(s.c_str());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return std::make_pair(code, out.str());
  };
  const std::string posts = (dir / "posts.jsonl").string();
  bool cli_ok = call({"synth", "--out", posts, "--seed", "4", "--posts-per-cell", "40"}).first == 0;
  std::string ppm[2];
  for (int i = 0; i < 2; ++i) {
    const std::string model = (dir / ("m" + std::to_string(i))).string();
    cli_ok = cli_ok && call({"build", "--in", posts, "--bbox", "40,-74,41,-73", "--out", model}).first == 0;
    const auto q = call({"query", "--model", model, "--phrase", "power outage", "--format", "ppm"});
    cli_ok = cli_ok && q.first == 0;
    ppm[i] = q.second;
  }
  identical = identical && cli_ok && ppm[0] == ppm[1] &&
              tree_bytes(dir / "m0") == tree_bytes(dir / "m1");
  return {lossless && identical, std::string("load == save: ") + (lossless ? "yes" : "no") +
                                     ", byte-identical outputs: " + (identical ? "yes" : "no")};
}

Outcome misc_fraction() {
  // Cell sizes 100, 200 and 300 token occurrences, each with exactly 5%
  // singleton occurrences. Every other word occurs at least twice.
  TempDir dir("acc-misc");
  std::ostringstream lines;
  int serial = 0;
  for (int cell = 0; cell < 3; ++cell) {
    const int tokens = 100 * (cell + 1);
    const int singles = tokens / 20;
    const double lat = 0.5 + cell;
    std::vector<std::string> words;
    for (int i = 0; i < singles; ++i) words.push_back("lone" + std::to_string(cell) + "x" + std::to_string(i));
    for (int i = 0; words.size() < static_cast<std::size_t>(tokens); ++i) {
      words.push_back("common" + std::to_string(i % 7));
    }
    for (std::size_t i = 0; i < words.size(); i += 10) {
      std::string text;
      for (std::size_t j = i; j < i + 10; ++j) text += (j > i ? " " : "") + words[j];
      lines << R"({"id":")" << serial++ << R"(","text":")" << text << R"(","lat":)" << lat
            << R"(,"lon":0.5,"lang":"en"})" << "\n";
    }
  }
  testing::spit(dir / "posts.jsonl", lines.str());
  const std::vector<std::string> args = {"geoperc", "build", "--in", (dir / "posts.jsonl").string(),
                                         "--bbox", "0,0,3,1", "--rows", "3", "--cols", "1",
                                         "--stopwords", "0", "--out", (dir / "model").string()};
  std::vector<const char *> argv;
  for (const auto &s : args) argv.push_back(s.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  const std::string report = out.str();
  const bool mean = report.find("misc-mapped words (mean per cell): 5.00%") != std::string::npos;
  const bool overall = report.find("misc-mapped words (overall): 5.00%") != std::string::npos;
  std::string line;
  std::istringstream in(report);
  std::string shown;
  while (std::getline(in, line)) {
    if (line.rfind("misc-mapped", 0) == 0) shown += (shown.empty() ? "" : "; ") + line;
  }
  return {code == 0 && mean && overall, shown.empty() ? err.str() : shown};
}

}  // namespace
}  // namespace geoperc

int main(int argc, char **argv) {
  using namespace geoperc;
  struct Criterion {
    int id;
    const char *name;
    double time_limit;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {1, "MKN normalization", 10.0, mkn_normalization},
      {2, "continuation and MLE normalization", 0.0, continuation_and_mle},
      {3, "discount formulas", 0.0, discount_formulas},
      {4, "hand-computed MKN values on C2", 0.0, hand_computed_c2},
      {5, "count oracle", 0.0, count_oracle},
      {6, "posterior normalization and Bayes arithmetic", 0.0, posterior_arithmetic},
      {7, "planted-signal recovery", 60.0, planted_signal},
      {8, "bigram vs unigram context", 0.0, bigram_context},
      {9, "zoom equivalence", 0.0, zoom_equivalence},
      {10, "round-trip and determinism", 0.0, round_trip},
      {11, "misc-fraction instrumentation", 0.0, misc_fraction},
  };
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failures = 0, ran = 0;
  for (const auto &c : criteria) {
    if (only != 0 && c.id != only) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.check();
    } catch (const std::exception &e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0.0 && seconds >= c.time_limit) {
      outcome.pass = false;
      outcome.detail += " (over the " + std::to_string(static_cast<int>(c.time_limit)) + " s limit)";
    }
    if (!outcome.pass) ++failures;
    std::printf("%s  %2d  %-46s %s [%.2f s]\n", outcome.pass ? "PASS" : "FAIL", c.id, c.name,
                outcome.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion numbered %s\n", argv[1]);
    return 1;
  }
  std::printf("%d of %d criteria passed\n", ran - failures, ran);
  return failures == 0 ? 0 : 1;
}
