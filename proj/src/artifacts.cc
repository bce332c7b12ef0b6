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

#include "geoperc/artifacts.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "geoperc/error.h"

namespace geoperc {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kListHeader = "version=1";

void write_file(const fs::path &path, const std::string &bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("io", "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("io", "failed writing " + path.string());
}

std::string read_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("missing-file", "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Error corrupt(const fs::path &path, const std::string &what) {
  return DataError("corrupt-table", path.string() + ": " + what);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

// Lines of a newline-terminated file, without the terminators.
std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

Count parse_count(std::string_view text, const fs::path &path) {
  Count value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw corrupt(path, "bad count '" + std::string(text) + "'");
  }
  return value;
}

std::string token_list(const std::vector<Token> &tokens) {
  std::string out(kListHeader);
  out += '\n';
  for (const auto &token : tokens) {
    out += token;
    out += '\n';
  }
  return out;
}

std::vector<Token> read_token_list(const fs::path &path) {
  const std::string text = read_file(path);
  const auto lines = lines_of(text);
  if (lines.empty() || lines.front() != kListHeader) throw corrupt(path, "missing version header");
  std::vector<Token> tokens;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) throw corrupt(path, "empty token");
    tokens.emplace_back(lines[i]);
  }
  return tokens;
}

std::string unigram_table(const CellCounts &counts) {
  std::vector<std::pair<std::string_view, Count>> rows(counts.unigrams().begin(),
                                                       counts.unigrams().end());
  std::sort(rows.begin(), rows.end());
  std::string out;
  for (const auto &[token, c] : rows) {
    out.append(token).append("\t").append(std::to_string(c)).append("\n");
  }
  return out;
}

std::string bigram_table(const CellCounts &counts) {
  std::vector<std::tuple<std::string_view, std::string_view, Count>> rows;
  for (const auto &[prev, next] : counts.successors()) {
    for (const auto &[w, c] : next) rows.emplace_back(prev, w, c);
  }
  std::sort(rows.begin(), rows.end());
  std::string out;
  for (const auto &[prev, w, c] : rows) {
    out.append(prev).append("\t").append(w).append("\t").append(std::to_string(c)).append("\n");
  }
  return out;
}

json config_json(const EstimatorConfig &cfg, const PrepConfig &prep) {
  return {{"mode", to_string(cfg.mode)},
          {"lambda1", cfg.lambda1},
          {"unigram_denominator", to_string(cfg.unigram_denominator)},
          {"single_token_rule", to_string(cfg.single_token_rule)},
          {"stopword_size", prep.stopword_size},
          {"singleton_threshold", prep.singleton_threshold}};
}

json report_json(const BuildReport &r) {
  return {{"input_posts", r.input_posts},
          {"outside_bbox", r.outside_bbox},
          {"retained_posts", r.retained_posts},
          {"occupied_cells", r.occupied_cells},
          {"tokens_after_stopwords", r.tokens_after_stopwords},
          {"misc_tokens", r.misc_tokens},
          {"mean_misc_fraction", r.mean_misc_fraction},
          {"overall_misc_fraction", r.overall_misc_fraction}};
}

BuildReport report_from_json(const json &j) {
  BuildReport r;
  r.input_posts = j.at("input_posts").get<Count>();
  r.outside_bbox = j.at("outside_bbox").get<Count>();
  r.retained_posts = j.at("retained_posts").get<Count>();
  r.occupied_cells = j.at("occupied_cells").get<Count>();
  r.tokens_after_stopwords = j.at("tokens_after_stopwords").get<Count>();
  r.misc_tokens = j.at("misc_tokens").get<Count>();
  r.mean_misc_fraction = j.at("mean_misc_fraction").get<double>();
  r.overall_misc_fraction = j.at("overall_misc_fraction").get<double>();
  return r;
}

json meta_json(const CellModel &model) {
  const DiscountSet &d = model.discounts;
  return {{"posts", model.posts},
          {"misc_fraction", model.vocab.mapped_fraction()},
          {"singleton_threshold", model.vocab.singleton_threshold()},
          {"discounts",
           {{"d1", d.d1}, {"d2", d.d2}, {"d3", d.d3},
            {"n1", d.n1}, {"n2", d.n2}, {"n3", d.n3}, {"n4", d.n4}}}};
}

json parse_json(const fs::path &path) {
  const std::string text = read_file(path);
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw corrupt(path, "invalid JSON");
  return doc;
}

CellModel load_cell(const fs::path &dir) {
  CellModel model;
  const json meta = parse_json(dir / "meta.json");
  try {
    model.posts = meta.at("posts").get<Count>();
    const json &d = meta.at("discounts");
    model.discounts.d1 = d.at("d1").get<double>();
    model.discounts.d2 = d.at("d2").get<double>();
    model.discounts.d3 = d.at("d3").get<double>();
    model.discounts.n1 = d.at("n1").get<Count>();
    model.discounts.n2 = d.at("n2").get<Count>();
    model.discounts.n3 = d.at("n3").get<Count>();
    model.discounts.n4 = d.at("n4").get<Count>();
    auto kept = read_token_list(dir / "vocab.txt");
    model.vocab = Vocabulary(std::set<Token, std::less<>>(kept.begin(), kept.end()),
                             meta.at("singleton_threshold").get<Count>(),
                             meta.at("misc_fraction").get<double>());
  } catch (const json::exception &e) {
    throw corrupt(dir / "meta.json", e.what());
  }

  const fs::path uni_path = dir / "unigrams.tsv";
  const std::string uni_text = read_file(uni_path);
  TokenMap<Count> unigram;
  for (auto line : lines_of(uni_text)) {
    const auto fields = split(line, '\t');
    if (fields.size() != 2 || fields[0].empty()) throw corrupt(uni_path, "expected token<TAB>count");
    if (!unigram.emplace(Token(fields[0]), parse_count(fields[1], uni_path)).second) {
      throw corrupt(uni_path, "duplicate token");
    }
  }

  const fs::path bi_path = dir / "bigrams.tsv";
  const std::string bi_text = read_file(bi_path);
  std::vector<std::pair<std::pair<Token, Token>, Count>> bigrams;
  for (auto line : lines_of(bi_text)) {
    const auto fields = split(line, '\t');
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
      throw corrupt(bi_path, "expected token<TAB>token<TAB>count");
    }
    bigrams.push_back({{Token(fields[0]), Token(fields[1])}, parse_count(fields[2], bi_path)});
  }
  try {
    model.counts = CellCounts::from_tables(std::move(unigram), bigrams);
  } catch (const Error &e) {
    throw corrupt(dir, e.what());
  }
  return model;
}

Post post_from_json(const json &j) {
  Post post;
  post.id = j.at("id").get<std::string>();
  post.text = j.at("text").get<std::string>();
  post.lat = j.at("lat").get<double>();
  post.lon = j.at("lon").get<double>();
  if (j.contains("lang")) post.lang = j.at("lang").get<std::string>();
  if (j.contains("timestamp")) post.timestamp = j.at("timestamp").get<std::string>();
  return post;
}

}  // namespace

std::string cell_dir_name(CellId cell) {
  return std::to_string(cell.row) + "_" + std::to_string(cell.col);
}

json ModelManifest::to_json() const {
  json cell_index = json::array();
  for (const auto &cell : cells) {
    cell_index.push_back({{"row", cell.row}, {"col", cell.col},
                          {"dir", "cells/" + cell_dir_name(cell)}});
  }
  return {{"version", version},
          {"bbox",
           {{"min_lat", bbox.min_lat}, {"min_lon", bbox.min_lon},
            {"max_lat", bbox.max_lat}, {"max_lon", bbox.max_lon}}},
          {"rows", rows},
          {"cols", cols},
          {"config", config_json(config, prep)},
          {"post_count", post_count},
          {"created", created},
          {"cells", std::move(cell_index)},
          {"report", report_json(report)}};
}

ModelManifest ModelManifest::from_json(const json &doc) {
  ModelManifest m;
  m.version = doc.at("version").get<int>();
  if (m.version != kModelFormatVersion) {
    throw DataError("version-mismatch", "unsupported model format version " +
                                            std::to_string(m.version));
  }
  const json &b = doc.at("bbox");
  m.bbox = {b.at("min_lat").get<double>(), b.at("min_lon").get<double>(),
            b.at("max_lat").get<double>(), b.at("max_lon").get<double>()};
  m.rows = doc.at("rows").get<int>();
  m.cols = doc.at("cols").get<int>();
  const json &c = doc.at("config");
  m.config.mode = parse_estimator_mode(c.at("mode").get<std::string>());
  m.config.lambda1 = c.at("lambda1").get<double>();
  m.config.unigram_denominator =
      parse_unigram_denominator(c.at("unigram_denominator").get<std::string>());
  m.config.single_token_rule = parse_single_token_rule(c.at("single_token_rule").get<std::string>());
  m.prep.stopword_size = c.at("stopword_size").get<std::size_t>();
  m.prep.singleton_threshold = c.at("singleton_threshold").get<Count>();
  m.post_count = doc.at("post_count").get<Count>();
  m.created = doc.at("created").get<std::string>();
  for (const auto &entry : doc.at("cells")) {
    m.cells.push_back({entry.at("row").get<int>(), entry.at("col").get<int>()});
  }
  m.report = report_from_json(doc.at("report"));
  return m;
}

ModelManifest describe_model(const ModelEnsemble &ens) {
  ModelManifest manifest;
  manifest.bbox = ens.grid.bbox();
  manifest.rows = ens.grid.rows();
  manifest.cols = ens.grid.cols();
  manifest.config = ens.config;
  manifest.prep = ens.prep;
  manifest.post_count = ens.total_posts;
  manifest.created = ens.created;
  manifest.report = ens.report;
  for (const auto &[cell, model] : ens.cells) manifest.cells.push_back(cell);
  return manifest;
}

ModelManifest save_model(const ModelEnsemble &ens, const fs::path &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("io", "cannot create " + dir.string() + ": " + ec.message());
  // Replace the cell tables of a previous model saved to the same place.
  if (fs::exists(dir / "manifest.json")) fs::remove_all(dir / "cells", ec);

  const ModelManifest manifest = describe_model(ens);
  for (const auto &[cell, model] : ens.cells) {
    const fs::path cell_dir = dir / "cells" / cell_dir_name(cell);
    fs::create_directories(cell_dir, ec);
    if (ec) throw IoError("io", "cannot create " + cell_dir.string() + ": " + ec.message());
    write_file(cell_dir / "unigrams.tsv", unigram_table(model.counts));
    write_file(cell_dir / "bigrams.tsv", bigram_table(model.counts));
    write_file(cell_dir / "vocab.txt",
               token_list(std::vector<Token>(model.vocab.kept().begin(), model.vocab.kept().end())));
    write_file(cell_dir / "meta.json", meta_json(model).dump(2) + "\n");
  }

  write_file(dir / "stopwords.txt", token_list(ens.stopwords.ranked()));
  std::ostringstream posts;
  write_posts_jsonl(posts, ens.posts);
  write_file(dir / "posts.jsonl", posts.str());
  write_file(dir / "manifest.json", manifest.to_json().dump(2) + "\n");
  return manifest;
}

ModelManifest read_manifest(const fs::path &dir) {
  const fs::path path = dir / "manifest.json";
  if (!fs::exists(path)) throw IoError("missing-manifest", "no manifest.json in " + dir.string());
  const json doc = parse_json(path);
  try {
    return ModelManifest::from_json(doc);
  } catch (const json::exception &e) {
    throw corrupt(path, e.what());
  }
}

ModelEnsemble load_model(const fs::path &dir) {
  const ModelManifest manifest = read_manifest(dir);

  ModelEnsemble ens;
  try {
    ens.grid = make_grid(manifest.bbox, manifest.rows, manifest.cols);
    validate_config(manifest.config);
  } catch (const Error &e) {
    throw corrupt(dir / "manifest.json", e.what());
  }
  ens.config = manifest.config;
  ens.prep = manifest.prep;
  ens.created = manifest.created;
  ens.report = manifest.report;
  ens.stopwords = StopwordSet(read_token_list(dir / "stopwords.txt"));

  for (const CellId cell : manifest.cells) {
    if (!ens.grid.valid(cell)) throw corrupt(dir / "manifest.json", "cell outside grid");
    const fs::path cell_dir = dir / "cells" / cell_dir_name(cell);
    if (!fs::is_directory(cell_dir)) {
      throw IoError("missing-file", "missing cell directory " + cell_dir.string());
    }
    CellModel model = load_cell(cell_dir);
    ens.total_posts += model.posts;
    if (!ens.cells.emplace(cell, std::move(model)).second) {
      throw corrupt(dir / "manifest.json", "duplicate cell entry");
    }
  }
  if (ens.total_posts != manifest.post_count) {
    throw corrupt(dir / "manifest.json", "cell post counts do not add up to post_count");
  }

  const fs::path posts_path = dir / "posts.jsonl";
  const std::string posts_text = read_file(posts_path);
  for (auto line : lines_of(posts_text)) {
    const json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (record.is_discarded()) throw corrupt(posts_path, "invalid JSON line");
    try {
      ens.posts.push_back(post_from_json(record));
    } catch (const json::exception &e) {
      throw corrupt(posts_path, e.what());
    }
  }
  if (ens.posts.size() != ens.total_posts) {
    throw corrupt(posts_path, "post count differs from manifest");
  }
  return ens;
}

ColorRamp::ColorRamp(std::vector<std::pair<double, Rgb>> stops) : stops_(std::move(stops)) {
  if (stops_.size() < 2 || stops_.front().first != 0.0 || stops_.back().first != 1.0) {
    throw InvalidArgument("color ramp must run from threshold 0 to threshold 1");
  }
  for (std::size_t i = 1; i < stops_.size(); ++i) {
    if (!(stops_[i].first > stops_[i - 1].first)) {
      throw InvalidArgument("color ramp thresholds must increase strictly");
    }
  }
}

const ColorRamp &ColorRamp::default_ramp() {
  static const ColorRamp ramp({{0.0, {16, 16, 48}},
                               {0.25, {120, 28, 109}},
                               {0.5, {212, 72, 66}},
                               {0.75, {251, 155, 6}},
                               {1.0, {252, 255, 164}}});
  return ramp;
}

Rgb ColorRamp::at(double score) const {
  if (!(score > 0.0)) return stops_.front().second;
  if (score >= 1.0) return stops_.back().second;
  std::size_t hi = 1;
  while (stops_[hi].first < score) ++hi;
  const auto &[t0, c0] = stops_[hi - 1];
  const auto &[t1, c1] = stops_[hi];
  const double f = (score - t0) / (t1 - t0);
  auto mix = [f](std::uint8_t a, std::uint8_t b) {
    return static_cast<std::uint8_t>(std::lround(a + (b - a) * f));
  };
  return {mix(c0.r, c1.r), mix(c0.g, c1.g), mix(c0.b, c1.b)};
}

json heatmap_geojson(const HeatMap &map) {
  json features = json::array();
  for (std::size_t i = 0; i < map.grid.cell_count(); ++i) {
    const CellId cell = map.grid.cell_at(i);
    const BBox b = cell_bbox(map.grid, cell);
    json ring = json::array({json::array({b.min_lon, b.min_lat}), json::array({b.max_lon, b.min_lat}),
                             json::array({b.max_lon, b.max_lat}), json::array({b.min_lon, b.max_lat}),
                             json::array({b.min_lon, b.min_lat})});
    const double score = i < map.scores.size() ? map.scores[i] : 0.0;
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "Polygon"}, {"coordinates", json::array({ring})}}},
                        {"properties", {{"row", cell.row}, {"col", cell.col}, {"score", score}}}});
  }
  return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

std::string heatmap_image(const HeatMap &map, const ColorRamp &ramp, int cell_px) {
  if (cell_px < 1) throw InvalidArgument("cell_px must be at least 1");
  const int rows = map.grid.rows();
  const int cols = map.grid.cols();
  const std::size_t width = static_cast<std::size_t>(cols) * cell_px;
  const std::size_t height = static_cast<std::size_t>(rows) * cell_px;
  std::string out = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.reserve(out.size() + width * height * 3);
  for (int band = rows - 1; band >= 0; --band) {
    std::string line;
    line.reserve(width * 3);
    for (int col = 0; col < cols; ++col) {
      const Rgb c = ramp.at(map.score({band, col}));
      for (int p = 0; p < cell_px; ++p) {
        line.push_back(static_cast<char>(c.r));
        line.push_back(static_cast<char>(c.g));
        line.push_back(static_cast<char>(c.b));
      }
    }
    for (int p = 0; p < cell_px; ++p) out += line;
  }
  return out;
}

std::string heatmap_ascii(const HeatMap &map) {
  static constexpr std::string_view kShades = " .:-=+*#%@";
  std::string out;
  for (int row = map.grid.rows() - 1; row >= 0; --row) {
    for (int col = 0; col < map.grid.cols(); ++col) {
      const double score = map.score({row, col});
      const int decile = std::clamp(static_cast<int>(std::floor(score * 10.0)), 0, 9);
      out += kShades[static_cast<std::size_t>(decile)];
    }
    out += '\n';
  }
  return out;
}

}  // namespace geoperc
