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

#include "geoperc/cli.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "geoperc/artifacts.h"
#include "geoperc/ensemble.h"
#include "geoperc/error.h"
#include "geoperc/ingest.h"
#include "geoperc/service.h"
#include "geoperc/synth.h"

namespace geoperc {
namespace {

namespace fs = std::filesystem;

struct EstimatorFlags {
  std::string mode = "mkn_normalizing";
  double lambda1 = 0.5;
  std::string unigram_denominator = "total_tokens";
  std::string single_token_rule = "continuation";

  EstimatorConfig config() const {
    EstimatorConfig cfg;
    cfg.mode = parse_estimator_mode(mode);
    cfg.lambda1 = lambda1;
    cfg.unigram_denominator = parse_unigram_denominator(unigram_denominator);
    cfg.single_token_rule = parse_single_token_rule(single_token_rule);
    validate_config(cfg);
    return cfg;
  }
};

struct BuildFlags {
  std::string in;
  std::string bbox;
  int rows = 10;
  int cols = 10;
  std::string out;
  EstimatorFlags estimator;
  std::size_t stopwords = 200;
  Count singleton_threshold = 1;
  std::string lang = "en,und";
  bool dedupe = false;
  std::string created;
};

struct QueryFlags {
  std::string model;
  std::string phrase;
  std::size_t top = 10;
  std::string format = "none";
  std::string output;
  int cell_px = 8;
  std::string mode;
};

struct ZoomFlags {
  std::string model;
  int row = 0;
  int col = 0;
  int rows = 10;
  int cols = 10;
  std::string out;
};

struct SynthFlags {
  std::string out;
  std::uint64_t seed = 1;
  std::string bbox = "40.0,-74.0,41.0,-73.0";
  int rows = 10;
  int cols = 10;
  int posts_per_cell = 200;
  int planted_row = -1;
  int planted_col = -1;
  double planted_factor = 10.0;
};

struct InspectFlags {
  std::string model;
  int row = 0;
  int col = 0;
  std::size_t top = 20;
};

struct ServeFlags {
  std::string model;
  std::string bind = "127.0.0.1";
  int port = 8080;
  std::size_t zoom_cache = 16;
  bool no_cors = false;
};

std::string percent(double fraction) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f%%", fraction * 100.0);
  return buffer;
}

std::string fixed(double value, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", digits, value);
  return buffer;
}

void require_model_dir(const std::string &path) {
  if (!fs::is_directory(path)) throw IoError("io", "model directory " + path + " does not exist");
}

void write_output(const std::string &path, const std::string &bytes) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("io", "cannot write " + path);
  file << bytes;
  if (!file) throw IoError("io", "failed writing " + path);
}

std::set<std::string> parse_languages(const std::string &text) {
  std::set<std::string> languages;
  if (text == "*") return languages;
  std::stringstream in(text);
  std::string tag;
  while (std::getline(in, tag, ',')) {
    if (!tag.empty()) languages.insert(tag);
  }
  return languages;
}

void add_estimator_flags(CLI::App &cmd, EstimatorFlags &flags) {
  cmd.add_option("--mode", flags.mode, "Estimator")
      ->check(CLI::IsMember({"mle", "interpolated", "mkn_paper_literal", "mkn_normalizing"}))
      ->capture_default_str();
  cmd.add_option("--lambda1", flags.lambda1, "Bigram weight for the interpolated estimator")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd.add_option("--unigram-denominator", flags.unigram_denominator,
                 "Unigram denominator for the interpolated estimator")
      ->check(CLI::IsMember({"total_tokens", "distinct_tokens"}))
      ->capture_default_str();
  cmd.add_option("--single-token-rule", flags.single_token_rule,
                 "Scoring rule for one-token phrases")
      ->check(CLI::IsMember({"continuation", "relative_frequency"}))
      ->capture_default_str();
}

int do_build(const BuildFlags &flags, std::ostream &out) {
  const BBox bbox = parse_bbox(flags.bbox);
  const GridSpec grid = make_grid(bbox, flags.rows, flags.cols);
  const EstimatorConfig cfg = flags.estimator.config();
  if (!fs::is_regular_file(flags.in)) throw IoError("io", "cannot read " + flags.in);

  ParseOptions parse_options;
  parse_options.languages = parse_languages(flags.lang);
  parse_options.dedupe = flags.dedupe;
  const ParseResult parsed = parse_posts_file(flags.in, parse_options);

  PrepConfig prep;
  prep.stopword_size = flags.stopwords;
  prep.singleton_threshold = flags.singleton_threshold;
  BuildOptions options;
  options.created = flags.created;
  const ModelEnsemble ens = build_ensemble(parsed.posts, grid, cfg, prep, options);
  save_model(ens, flags.out);

  const BuildReport &r = ens.report;
  out << "input lines: " << parsed.report.total_lines << "\n";
  out << "accepted posts: " << parsed.report.accepted << "\n";
  for (const auto &[reason, n] : parsed.report.rejected) {
    out << "rejected " << reason << ": " << n << "\n";
  }
  out << "outside bbox: " << r.outside_bbox << "\n";
  out << "retained posts: " << r.retained_posts << "\n";
  out << "occupied cells: " << r.occupied_cells << " of " << grid.cell_count() << "\n";
  out << "stopwords: " << ens.stopwords.size() << "\n";
  out << "tokens after stopwords: " << r.tokens_after_stopwords << "\n";
  out << "misc-mapped words (mean per cell): " << percent(r.mean_misc_fraction) << "\n";
  out << "misc-mapped words (overall): " << percent(r.overall_misc_fraction) << "\n";
  out << "model: " << flags.out << "\n";
  return kExitOk;
}

int do_query(const QueryFlags &flags, std::ostream &out) {
  require_model_dir(flags.model);
  const ModelEnsemble ens = load_model(flags.model);
  EstimatorConfig cfg = ens.config;
  if (!flags.mode.empty()) cfg.mode = parse_estimator_mode(flags.mode);
  const HeatMap map = posterior(ens, flags.phrase, cfg);

  std::string rendering;
  if (flags.format == "ascii") {
    rendering = heatmap_ascii(map);
  } else if (flags.format == "geojson") {
    rendering = heatmap_geojson(map).dump(2) + "\n";
  } else if (flags.format == "ppm") {
    rendering = heatmap_image(map, ColorRamp::default_ramp(), flags.cell_px);
  }

  // A rendering without --output owns stdout.
  if (!rendering.empty() && flags.output.empty()) {
    out << rendering;
    return kExitOk;
  }
  out << "phrase:";
  for (const auto &token : map.phrase) out << ' ' << token;
  out << "\n";
  if (map.degenerate) {
    out << "degenerate: no occupied cell gives the phrase nonzero likelihood\n";
  }
  for (const auto &ranked : top_cells(map, flags.top)) {
    out << ranked.cell.row << "\t" << ranked.cell.col << "\t" << fixed(ranked.score, 6) << "\n";
  }
  if (!rendering.empty()) write_output(flags.output, rendering);
  return kExitOk;
}

int do_zoom(const ZoomFlags &flags, std::ostream &out) {
  require_model_dir(flags.model);
  const ModelEnsemble parent = load_model(flags.model);
  BuildOptions options;
  options.created = parent.created;
  const ModelEnsemble child = zoom(parent, CellId{flags.row, flags.col}, flags.rows, flags.cols, options);
  save_model(child, flags.out);
  const BBox &b = child.grid.bbox();
  out << "zoomed cell (" << flags.row << "," << flags.col << "): " << child.total_posts
      << " posts\n";
  out << "bbox: " << fixed(b.min_lat, 6) << "," << fixed(b.min_lon, 6) << ","
      << fixed(b.max_lat, 6) << "," << fixed(b.max_lon, 6) << "\n";
  out << "model: " << flags.out << "\n";
  return kExitOk;
}

int do_synth(const SynthFlags &flags, std::ostream &out) {
  SynthConfig config;
  config.seed = flags.seed;
  config.bbox = parse_bbox(flags.bbox);
  config.rows = flags.rows;
  config.cols = flags.cols;
  config.posts_per_cell = flags.posts_per_cell;
  config.planted = {flags.planted_row, flags.planted_col};
  config.planted_factor = flags.planted_factor;
  const SynthCorpus corpus = generate_planted_corpus(config);

  std::ostringstream lines;
  write_posts_jsonl(lines, corpus.posts);
  write_output(flags.out, lines.str());
  out << "posts: " << corpus.posts.size() << "\n";
  out << "planted cell: " << corpus.planted.row << "," << corpus.planted.col << "\n";
  out << "phrase: " << corpus.phrase << "\n";
  return kExitOk;
}

int do_inspect(const InspectFlags &flags, std::ostream &out) {
  require_model_dir(flags.model);
  const ModelEnsemble ens = load_model(flags.model);
  const CellId cell{flags.row, flags.col};
  cell_bbox(ens.grid, cell);
  auto it = ens.cells.find(cell);
  out << "cell " << cell.row << "," << cell.col << ": "
      << (it == ens.cells.end() ? 0 : it->second.posts) << " posts\n";
  if (it == ens.cells.end()) return kExitOk;

  const CellModel &model = it->second;
  out << "tokens: " << model.counts.total_tokens() << ", distinct: "
      << model.counts.distinct_tokens() << ", bigram types: "
      << model.counts.continuation_total() << "\n";
  out << "discounts: " << fixed(model.discounts.d1, 4) << " " << fixed(model.discounts.d2, 4)
      << " " << fixed(model.discounts.d3, 4) << "\n";
  out << "misc-mapped words: " << percent(model.vocab.mapped_fraction()) << "\n";

  std::vector<std::tuple<Count, std::string_view, std::string_view>> rows;
  for (const auto &[prev, next] : model.counts.successors()) {
    for (const auto &[w, c] : next) rows.emplace_back(c, prev, w);
  }
  std::sort(rows.begin(), rows.end(), [](const auto &a, const auto &b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    return std::tie(std::get<1>(a), std::get<2>(a)) < std::tie(std::get<1>(b), std::get<2>(b));
  });
  if (rows.size() > flags.top) rows.resize(flags.top);
  for (const auto &[c, prev, w] : rows) out << prev << "\t" << w << "\t" << c << "\n";
  return kExitOk;
}

int do_serve(const ServeFlags &flags, std::ostream &out) {
  require_model_dir(flags.model);
  ServiceOptions options;
  options.zoom_cache = flags.zoom_cache;
  options.cors = !flags.no_cors;
  out << "serving " << flags.model << " on " << flags.bind << ":" << flags.port << std::endl;
  if (!serve(flags.model, flags.bind, flags.port, options)) {
    throw IoError("io", "cannot listen on " + flags.bind + ":" + std::to_string(flags.port));
  }
  return kExitOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return kExitUsage;
    case ErrorKind::kData: return kExitData;
    case ErrorKind::kIo: return kExitIo;
  }
  return kExitData;
}

}  // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Per-cell bigram language models over geo-tagged posts", "geoperc"};
  app.require_subcommand(1);

  BuildFlags build;
  auto *build_cmd = app.add_subcommand("build", "Ingest posts and write a model directory");
  build_cmd->add_option("--in", build.in, "Posts as JSON Lines (.gz accepted)")->required();
  build_cmd->add_option("--bbox", build.bbox, "min_lat,min_lon,max_lat,max_lon")->required();
  build_cmd->add_option("--rows", build.rows, "Grid rows")->check(CLI::PositiveNumber)->capture_default_str();
  build_cmd->add_option("--cols", build.cols, "Grid columns")->check(CLI::PositiveNumber)->capture_default_str();
  build_cmd->add_option("--out", build.out, "Model directory to write")->required();
  add_estimator_flags(*build_cmd, build.estimator);
  build_cmd->add_option("--stopwords", build.stopwords, "Stopword list size")->capture_default_str();
  build_cmd->add_option("--singleton-threshold", build.singleton_threshold,
                        "Words seen at most this often in a cell become <misc>; 0 disables")
      ->capture_default_str();
  build_cmd->add_option("--lang", build.lang, "Accepted language tags, comma separated; * for all")
      ->capture_default_str();
  build_cmd->add_flag("--dedupe", build.dedupe, "Drop posts whose id was already seen");
  build_cmd->add_option("--created", build.created,
                        "Timestamp recorded in the manifest (default: SOURCE_DATE_EPOCH or epoch)");

  QueryFlags query;
  auto *query_cmd = app.add_subcommand("query", "Posterior heat map for a phrase");
  query_cmd->add_option("--model", query.model, "Model directory")->required();
  query_cmd->add_option("--phrase", query.phrase, "Query phrase")->required();
  query_cmd->add_option("--top", query.top, "Ranked cells to print")->capture_default_str();
  query_cmd->add_option("--format", query.format, "Rendering")
      ->check(CLI::IsMember({"none", "ascii", "geojson", "ppm"}))
      ->capture_default_str();
  query_cmd->add_option("--output", query.output, "Write the rendering here instead of stdout");
  query_cmd->add_option("--cell-px", query.cell_px, "Pixels per cell for ppm")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  query_cmd->add_option("--mode", query.mode, "Override the model's estimator")
      ->check(CLI::IsMember({"mle", "interpolated", "mkn_paper_literal", "mkn_normalizing"}));

  ZoomFlags zoom_flags;
  auto *zoom_cmd = app.add_subcommand("zoom", "Rebuild one cell as a finer grid");
  zoom_cmd->add_option("--model", zoom_flags.model, "Parent model directory")->required();
  zoom_cmd->add_option("--row", zoom_flags.row, "Cell row")->required();
  zoom_cmd->add_option("--col", zoom_flags.col, "Cell column")->required();
  zoom_cmd->add_option("--rows", zoom_flags.rows, "Sub-grid rows")->check(CLI::PositiveNumber)->capture_default_str();
  zoom_cmd->add_option("--cols", zoom_flags.cols, "Sub-grid columns")->check(CLI::PositiveNumber)->capture_default_str();
  zoom_cmd->add_option("--out", zoom_flags.out, "Model directory to write")->required();

  SynthFlags synth;
  auto *synth_cmd = app.add_subcommand("synth", "Write a planted-signal demo corpus");
  synth_cmd->add_option("--out", synth.out, "JSON Lines file to write")->required();
  synth_cmd->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--bbox", synth.bbox, "min_lat,min_lon,max_lat,max_lon")->capture_default_str();
  synth_cmd->add_option("--rows", synth.rows, "Grid rows")->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--cols", synth.cols, "Grid columns")->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--posts-per-cell", synth.posts_per_cell, "Posts per cell")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd->add_option("--planted-row", synth.planted_row, "Planted cell row (-1: from seed)")
      ->capture_default_str();
  synth_cmd->add_option("--planted-col", synth.planted_col, "Planted cell column (-1: from seed)")
      ->capture_default_str();
  synth_cmd->add_option("--planted-factor", synth.planted_factor,
                        "Relative frequency boost of the target bigram in the planted cell")
      ->capture_default_str();

  InspectFlags inspect;
  auto *inspect_cmd = app.add_subcommand("inspect", "Show a cell's most frequent bigrams");
  inspect_cmd->add_option("--model", inspect.model, "Model directory")->required();
  inspect_cmd->add_option("--row", inspect.row, "Cell row")->required();
  inspect_cmd->add_option("--col", inspect.col, "Cell column")->required();
  inspect_cmd->add_option("--top", inspect.top, "Bigrams to list")->capture_default_str();

  ServeFlags serve_flags;
  auto *serve_cmd = app.add_subcommand("serve", "Serve a model over HTTP");
  serve_cmd->add_option("--model", serve_flags.model, "Model directory")->required();
  serve_cmd->add_option("--bind", serve_flags.bind, "Listen address")->capture_default_str();
  serve_cmd->add_option("--port", serve_flags.port, "Listen port")->capture_default_str();
  serve_cmd->add_option("--zoom-cache", serve_flags.zoom_cache, "Zoomed models kept in memory")
      ->capture_default_str();
  serve_cmd->add_flag("--no-cors", serve_flags.no_cors, "Do not send CORS headers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError &e) {
    err << "error[usage]: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*build_cmd) return do_build(build, out);
    if (*query_cmd) return do_query(query, out);
    if (*zoom_cmd) return do_zoom(zoom_flags, out);
    if (*synth_cmd) return do_synth(synth, out);
    if (*inspect_cmd) return do_inspect(inspect, out);
    if (*serve_cmd) return do_serve(serve_flags, out);
  } catch (const Error &e) {
    err << "error[" << e.code() << "]: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception &e) {
    err << "error[internal]: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace geoperc
