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

#include "geoperc/ingest.h"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <zlib.h>

#include "geoperc/error.h"
#include "json.hpp"

namespace geoperc {
namespace {

using nlohmann::json;

std::optional<std::string> optional_string(const json &record, const char *key) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  return it->dump();
}

// Returns the rejection reason, or nullptr when the record is accepted.
const char *convert(const json &record, const ParseOptions &options, Post &post) {
  if (!record.is_object()) return kRejectMalformed;

  auto lat = record.find("lat");
  auto lon = record.find("lon");
  if (lat == record.end() || lon == record.end() || lat->is_null() || lon->is_null()) {
    return kRejectNoGeo;
  }
  if (!lat->is_number() || !lon->is_number()) return kRejectBadCoords;
  post.lat = lat->get<double>();
  post.lon = lon->get<double>();
  if (!std::isfinite(post.lat) || !std::isfinite(post.lon) || std::abs(post.lat) > 90.0 ||
      std::abs(post.lon) > 180.0) {
    return kRejectBadCoords;
  }

  auto text = record.find("text");
  if (text == record.end() || !text->is_string() || text->get_ref<const std::string &>().empty()) {
    return kRejectEmptyText;
  }
  post.text = text->get<std::string>();

  post.lang = optional_string(record, "lang");
  if (!options.languages.empty()) {
    const std::string &tag = post.lang ? *post.lang : std::string("und");
    if (!options.languages.contains(tag)) return kRejectLanguage;
  }

  post.id = optional_string(record, "id").value_or("");
  post.timestamp = optional_string(record, "timestamp");
  return nullptr;
}

std::string read_gzip(const std::string &path) {
  gzFile file = gzopen(path.c_str(), "rb");
  if (file == nullptr) throw IoError("io", "cannot open " + path);
  std::string data;
  char buffer[1 << 16];
  int n = 0;
  while ((n = gzread(file, buffer, sizeof(buffer))) > 0) data.append(buffer, n);
  int errnum = 0;
  const char *message = gzerror(file, &errnum);
  const bool failed = n < 0 || (errnum != Z_OK && errnum != Z_STREAM_END);
  const std::string detail = failed && message != nullptr ? message : "";
  gzclose(file);
  if (failed) throw IoError("io", "cannot decompress " + path + ": " + detail);
  return data;
}

}  // namespace

std::uint64_t ParseReport::rejected_total() const {
  std::uint64_t total = 0;
  for (const auto &[reason, n] : rejected) total += n;
  return total;
}

ParseResult parse_posts(std::istream &in, const ParseOptions &options) {
  ParseResult result;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  while (std::getline(in, line)) {
    ++result.report.total_lines;
    json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
    Post post;
    const char *reason = record.is_discarded() ? kRejectMalformed : convert(record, options, post);
    if (reason == nullptr && options.dedupe && !seen_ids.insert(post.id).second) {
      reason = kRejectDuplicate;
    }
    if (reason != nullptr) {
      ++result.report.rejected[reason];
      continue;
    }
    ++result.report.accepted;
    result.posts.push_back(std::move(post));
  }
  if (in.bad()) throw IoError("io", "error while reading post stream");
  return result;
}

ParseResult parse_posts_file(const std::string &path, const ParseOptions &options) {
  if (path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0) {
    std::istringstream in(read_gzip(path));
    return parse_posts(in, options);
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("io", "cannot open " + path);
  return parse_posts(in, options);
}

std::string post_to_json(const Post &post) {
  json record = json::object();
  record["id"] = post.id;
  record["text"] = post.text;
  record["lat"] = post.lat;
  record["lon"] = post.lon;
  if (post.lang) record["lang"] = *post.lang;
  if (post.timestamp) record["timestamp"] = *post.timestamp;
  return record.dump(-1, ' ', false, json::error_handler_t::replace);
}

void write_posts_jsonl(std::ostream &out, std::span<const Post> posts) {
  for (const auto &post : posts) out << post_to_json(post) << '\n';
}

}  // namespace geoperc
