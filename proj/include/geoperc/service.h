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

#ifndef GEOPERC_SERVICE_H_
#define GEOPERC_SERVICE_H_

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

#include "geoperc/ensemble.h"

namespace httplib {
class Server;
}

namespace geoperc {

struct ServiceOptions {
  // Zoomed ensembles kept alive at once, root excluded.
  std::size_t zoom_cache = 16;
  bool cors = true;
};

struct Reply {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// HTTP facade over a root ensemble and the zoomed ensembles derived from
// it. Every handler is callable directly; mount() wires them into a server:
//
//   GET    /model?model=<id>
//   GET    /query?phrase=...&model=<id>&k=<n>
//   GET    /heatmap.geojson?phrase=...&model=<id>
//   POST   /zoom            {"model", "row", "col", "rows", "cols"}
//   DELETE /zoom/<id>
//
// Errors come back as {"error": message, "code": code} with status 400,
// 404 (unknown model id), 409 (empty cell) or 500.
class GeoService {
 public:
  static constexpr const char *kRootId = "root";

  explicit GeoService(ModelEnsemble root, ServiceOptions options = {});

  Reply get_model(const std::string &model_id);
  Reply get_query(const std::optional<std::string> &phrase, const std::string &model_id,
                  std::size_t k);
  Reply get_heatmap_geojson(const std::optional<std::string> &phrase,
                            const std::string &model_id);
  Reply post_zoom(const std::string &body);
  Reply delete_zoom(const std::string &model_id);

  void mount(httplib::Server &server);

  // Ids currently held, root first.
  std::vector<std::string> live_models() const;

 private:
  using ZoomKey = std::tuple<std::string, int, int, int, int>;

  struct Entry {
    std::shared_ptr<const ModelEnsemble> ensemble;
    std::string parent;
    std::optional<ZoomKey> key;
    std::shared_ptr<std::atomic<std::uint64_t>> last_used;
  };

  std::shared_ptr<const ModelEnsemble> find(const std::string &model_id);
  void evict_locked(const std::string &keep);
  std::size_t child_count_locked(const std::string &model_id) const;

  ServiceOptions options_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, Entry> models_;
  std::map<ZoomKey, std::string> zoom_index_;
  std::atomic<std::uint64_t> clock_{0};
  std::uint64_t next_zoom_id_ = 1;

  std::mutex build_locks_mutex_;
  std::map<ZoomKey, std::shared_ptr<std::mutex>> build_locks_;

  std::atomic<std::uint64_t> requests_{0};
};

// Loads the model at `model_path` and blocks serving it. Returns false if
// the address could not be bound.
bool serve(const std::string &model_path, const std::string &bind_address, int port,
           const ServiceOptions &options);

}  // namespace geoperc

#endif  // GEOPERC_SERVICE_H_
