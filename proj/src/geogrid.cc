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

#include "geoperc/geogrid.h"

#include <cmath>
#include <sstream>
#include <vector>

#include "geoperc/error.h"

namespace geoperc {
namespace {

// Index of the band containing `x` among `n` bands whose edges are given by
// `edge`. Starts from the arithmetic estimate and nudges it so the answer
// agrees with the edges cell_bbox reports.
template <typename EdgeFn>
int band_of(double x, double lo, double span, int n, EdgeFn edge) {
  int i = static_cast<int>(std::floor((x - lo) / span * n));
  if (i < 0) i = 0;
  if (i > n - 1) i = n - 1;
  while (i > 0 && x < edge(i)) --i;
  while (i < n - 1 && x >= edge(i + 1)) ++i;
  return i;
}

}  // namespace

void validate_bbox(const BBox &b) {
  const auto finite = std::isfinite(b.min_lat) && std::isfinite(b.max_lat) &&
                      std::isfinite(b.min_lon) && std::isfinite(b.max_lon);
  if (!finite) throw InvalidArgument("bbox coordinates must be finite");
  if (!(b.min_lat < b.max_lat) || !(b.min_lon < b.max_lon)) {
    throw InvalidArgument("bbox must have min < max on both axes");
  }
  if (b.min_lat < -90.0 || b.max_lat > 90.0 || b.min_lon < -180.0 || b.max_lon > 180.0) {
    throw InvalidArgument("bbox outside valid latitude/longitude range");
  }
}

BBox parse_bbox(const std::string &text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(part, &used));
      while (used < part.size() && std::isspace(static_cast<unsigned char>(part[used]))) ++used;
      if (used != part.size()) throw InvalidArgument("bad number in bbox: " + part);
    } catch (const std::logic_error &) {
      throw InvalidArgument("bad number in bbox: " + part);
    }
  }
  if (values.size() != 4) {
    throw InvalidArgument("bbox needs four values min_lat,min_lon,max_lat,max_lon");
  }
  BBox bbox{values[0], values[1], values[2], values[3]};
  validate_bbox(bbox);
  return bbox;
}

GridSpec make_grid(const BBox &bbox, int rows, int cols) {
  validate_bbox(bbox);
  if (rows < 1 || cols < 1) throw InvalidArgument("grid dimensions must be positive");
  GridSpec grid;
  grid.bbox_ = bbox;
  grid.rows_ = rows;
  grid.cols_ = cols;
  return grid;
}

double GridSpec::lat_edge(int r) const {
  if (r >= rows_) return bbox_.max_lat;
  return bbox_.min_lat + bbox_.height() * r / rows_;
}

double GridSpec::lon_edge(int c) const {
  if (c >= cols_) return bbox_.max_lon;
  return bbox_.min_lon + bbox_.width() * c / cols_;
}

std::optional<CellId> locate(const GridSpec &grid, double lat, double lon) {
  if (!std::isfinite(lat) || !std::isfinite(lon) || !grid.bbox().contains(lat, lon)) {
    return std::nullopt;
  }
  const auto &b = grid.bbox();
  const int row = band_of(lat, b.min_lat, b.height(), grid.rows(),
                          [&](int r) { return grid.lat_edge(r); });
  const int col = band_of(lon, b.min_lon, b.width(), grid.cols(),
                          [&](int c) { return grid.lon_edge(c); });
  return CellId{row, col};
}

BBox cell_bbox(const GridSpec &grid, CellId cell) {
  if (!grid.valid(cell)) {
    throw InvalidArgument("cell (" + std::to_string(cell.row) + "," + std::to_string(cell.col) +
                          ") outside " + std::to_string(grid.rows()) + "x" +
                          std::to_string(grid.cols()) + " grid");
  }
  return BBox{grid.lat_edge(cell.row), grid.lon_edge(cell.col), grid.lat_edge(cell.row + 1),
              grid.lon_edge(cell.col + 1)};
}

}  // namespace geoperc
