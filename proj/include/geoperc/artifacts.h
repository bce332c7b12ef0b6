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

#ifndef GEOPERC_ARTIFACTS_H_
#define GEOPERC_ARTIFACTS_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "geoperc/ensemble.h"
#include "json.hpp"

namespace geoperc {

inline constexpr int kModelFormatVersion = 1;

// Model directory layout:
//   manifest.json
//   stopwords.txt                 version=1 header, one token per line
//   posts.jsonl                   retained posts, canonical order
//   cells/<row>_<col>/vocab.txt   version=1 header, kept tokens
//   cells/<row>_<col>/unigrams.tsv
//   cells/<row>_<col>/bigrams.tsv
//   cells/<row>_<col>/meta.json   post count, discounts, misc fraction
struct ModelManifest {
  int version = kModelFormatVersion;
  BBox bbox;
  int rows = 0;
  int cols = 0;
  EstimatorConfig config;
  PrepConfig prep;
  Count post_count = 0;
  std::string created;
  std::vector<CellId> cells;
  BuildReport report;

  nlohmann::json to_json() const;
  static ModelManifest from_json(const nlohmann::json &doc);
};

// Manifest describing an in-memory ensemble, as save_model would write it.
ModelManifest describe_model(const ModelEnsemble &ens);

std::string cell_dir_name(CellId cell);

// Writes the ensemble under `dir`, creating it if needed. Output bytes
// depend only on the ensemble.
ModelManifest save_model(const ModelEnsemble &ens, const std::filesystem::path &dir);

// Error codes: missing-manifest, missing-file (I/O), version-mismatch,
// corrupt-table (data).
ModelEnsemble load_model(const std::filesystem::path &dir);
ModelManifest read_manifest(const std::filesystem::path &dir);

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  bool operator==(const Rgb &) const = default;
};

// Piecewise-linear color scale over [0, 1].
class ColorRamp {
 public:
  // Thresholds must increase strictly from exactly 0 to exactly 1.
  explicit ColorRamp(std::vector<std::pair<double, Rgb>> stops);

  static const ColorRamp &default_ramp();

  Rgb at(double score) const;
  const std::vector<std::pair<double, Rgb>> &stops() const { return stops_; }

 private:
  std::vector<std::pair<double, Rgb>> stops_;
};

// FeatureCollection with one Polygon per cell in row-major order.
// Coordinates are [lon, lat] as GeoJSON requires.
nlohmann::json heatmap_geojson(const HeatMap &map);

// Binary PPM (P6), cols*cell_px wide and rows*cell_px high, north up: the
// last (northernmost) grid row is drawn at the top.
std::string heatmap_image(const HeatMap &map, const ColorRamp &ramp, int cell_px);

// One line per grid row, north up, one character per cell from
// " .:-=+*#%@" chosen by score decile.
std::string heatmap_ascii(const HeatMap &map);

}  // namespace geoperc

#endif  // GEOPERC_ARTIFACTS_H_
