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

#ifndef GEOPERC_GEOGRID_H_
#define GEOPERC_GEOGRID_H_

#include <compare>
#include <cstddef>
#include <optional>
#include <string>

namespace geoperc {

// Latitude/longitude rectangle in degrees.
struct BBox {
  double min_lat = 0.0;
  double min_lon = 0.0;
  double max_lat = 0.0;
  double max_lon = 0.0;

  double height() const { return max_lat - min_lat; }
  double width() const { return max_lon - min_lon; }
  bool contains(double lat, double lon) const {
    return lat >= min_lat && lat <= max_lat && lon >= min_lon && lon <= max_lon;
  }

  bool operator==(const BBox &) const = default;
};

// Throws invalid-argument unless min < max on both axes and every corner is
// a valid coordinate.
void validate_bbox(const BBox &bbox);

// Parses "min_lat,min_lon,max_lat,max_lon".
BBox parse_bbox(const std::string &text);

struct CellId {
  int row = 0;
  int col = 0;

  auto operator<=>(const CellId &) const = default;
};

// Row 0 is the southernmost band of cells, column 0 the westernmost.
class GridSpec {
 public:
  GridSpec() = default;

  const BBox &bbox() const { return bbox_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t cell_count() const { return static_cast<std::size_t>(rows_) * cols_; }
  double cell_height() const { return bbox_.height() / rows_; }
  double cell_width() const { return bbox_.width() / cols_; }

  bool valid(CellId cell) const {
    return cell.row >= 0 && cell.row < rows_ && cell.col >= 0 && cell.col < cols_;
  }
  // Row-major dense index.
  std::size_t index(CellId cell) const {
    return static_cast<std::size_t>(cell.row) * cols_ + cell.col;
  }
  CellId cell_at(std::size_t index) const {
    return {static_cast<int>(index / cols_), static_cast<int>(index % cols_)};
  }

  // Southern edge of row `r`; lat_edge(rows()) is exactly max_lat.
  double lat_edge(int r) const;
  double lon_edge(int c) const;

  bool operator==(const GridSpec &) const = default;

 private:
  friend GridSpec make_grid(const BBox &bbox, int rows, int cols);

  BBox bbox_;
  int rows_ = 1;
  int cols_ = 1;
};

GridSpec make_grid(const BBox &bbox, int rows, int cols);

// The cell containing the point, or nullopt outside the bbox. Cells are
// half-open [lo, hi) except the last row and column, which also own the
// bbox's upper edge.
std::optional<CellId> locate(const GridSpec &grid, double lat, double lon);

BBox cell_bbox(const GridSpec &grid, CellId cell);

}  // namespace geoperc

#endif  // GEOPERC_GEOGRID_H_
