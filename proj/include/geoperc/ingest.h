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

#ifndef GEOPERC_INGEST_H_
#define GEOPERC_INGEST_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace geoperc {

// One geo-tagged message.
struct Post {
  std::string id;
  std::string text;
  double lat = 0.0;
  double lon = 0.0;
  std::optional<std::string> lang;
  std::optional<std::string> timestamp;

  bool operator==(const Post &) const = default;
  // Canonical order used wherever post order must not matter.
  auto operator<=>(const Post &) const = default;
};

struct ParseOptions {
  // Accepted `lang` values. Records without a lang field pass only when
  // "und" is listed. An empty set disables language filtering.
  std::set<std::string> languages = {"en", "und"};
  // Reject records whose id was already accepted.
  bool dedupe = false;
};

// Rejection reasons used as keys of ParseReport::rejected.
inline constexpr const char *kRejectMalformed = "malformed-json";
inline constexpr const char *kRejectNoGeo = "no-geo";
inline constexpr const char *kRejectBadCoords = "bad-coords";
inline constexpr const char *kRejectEmptyText = "empty-text";
inline constexpr const char *kRejectLanguage = "lang-filtered";
inline constexpr const char *kRejectDuplicate = "duplicate-id";

struct ParseReport {
  std::uint64_t total_lines = 0;
  std::uint64_t accepted = 0;
  std::map<std::string, std::uint64_t> rejected;

  std::uint64_t rejected_total() const;
};

struct ParseResult {
  std::vector<Post> posts;
  ParseReport report;
};

// Reads JSON Lines. Bad records are tallied and skipped; only a stream
// failure is fatal.
ParseResult parse_posts(std::istream &in, const ParseOptions &options = {});

// Same for a file; names ending in ".gz" are decompressed. Throws an I/O
// error if the file cannot be read.
ParseResult parse_posts_file(const std::string &path, const ParseOptions &options = {});

// Compact single-line JSON for a post, with keys in a fixed order.
std::string post_to_json(const Post &post);
void write_posts_jsonl(std::ostream &out, std::span<const Post> posts);

}  // namespace geoperc

#endif  // GEOPERC_INGEST_H_
