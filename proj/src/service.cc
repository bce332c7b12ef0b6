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

#include "geoperc/service.h"

#include <algorithm>
#include <limits>

#include "geoperc/artifacts.h"
#include "geoperc/error.h"
#include "httplib.h"
#include "json.hpp"

namespace geoperc {
namespace {

using nlohmann::json;

Reply json_reply(int status, const json &doc) { return {status, "application/json", doc.dump()}; }

Reply error_reply(int status, const std::string &code, const std::string &message) {
  return json_reply(status, {{"error", message}, {"code", code}});
}

Reply unknown_model(const std::string &id) {
  return error_reply(404, "unknown-model", "no model with id '" + id + "'");
}

// Maps library errors onto HTTP statuses.
Reply reply_for(const Error &e) {
  if (e.code() == "empty-corpus") return error_reply(409, "empty-cell", e.what());
  if (e.kind() == ErrorKind::kIo) return error_reply(500, e.code(), e.what());
  return error_reply(400, e.code(), e.what());
}

json bbox_json(const BBox &b) {
  return {{"min_lat", b.min_lat}, {"min_lon", b.min_lon},
          {"max_lat", b.max_lat}, {"max_lon", b.max_lon}};
}

std::optional<std::string> param(const httplib::Request &req, const char *name) {
  if (!req.has_param(name)) return std::nullopt;
  return req.get_param_value(name);
}

void send(httplib::Response &res, const Reply &reply) {
  res.status = reply.status;
  res.set_content(reply.body, reply.content_type);
}

}  // namespace

GeoService::GeoService(ModelEnsemble root, ServiceOptions options) : options_(options) {
  options_.zoom_cache = std::max<std::size_t>(options_.zoom_cache, 1);
  Entry entry;
  entry.ensemble = std::make_shared<const ModelEnsemble>(std::move(root));
  entry.last_used = std::make_shared<std::atomic<std::uint64_t>>(0);
  models_.emplace(kRootId, std::move(entry));
}

std::shared_ptr<const ModelEnsemble> GeoService::find(const std::string &model_id) {
  std::shared_lock lock(mutex_);
  auto it = models_.find(model_id);
  if (it == models_.end()) return nullptr;
  it->second.last_used->store(++clock_);
  return it->second.ensemble;
}

std::vector<std::string> GeoService::live_models() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> ids{kRootId};
  for (const auto &[id, entry] : models_) {
    if (id != kRootId) ids.push_back(id);
  }
  return ids;
}

Reply GeoService::get_model(const std::string &model_id) {
  ++requests_;
  auto ens = find(model_id);
  if (!ens) return unknown_model(model_id);
  std::string parent;
  {
    std::shared_lock lock(mutex_);
    auto it = models_.find(model_id);
    if (it != models_.end()) parent = it->second.parent;
  }
  const ModelManifest manifest = describe_model(*ens);
  json doc = manifest.to_json();
  doc.erase("cells");
  doc["model"] = model_id;
  doc["parent"] = parent.empty() ? json(nullptr) : json(parent);
  doc["grid"] = {{"rows", ens->grid.rows()},
                 {"cols", ens->grid.cols()},
                 {"cell_height", ens->grid.cell_height()},
                 {"cell_width", ens->grid.cell_width()},
                 {"occupied_cells", ens->cells.size()}};
  return json_reply(200, doc);
}

Reply GeoService::get_query(const std::optional<std::string> &phrase,
                            const std::string &model_id, std::size_t k) {
  ++requests_;
  if (!phrase) return error_reply(400, "bad-request", "missing 'phrase' parameter");
  auto ens = find(model_id);
  if (!ens) return unknown_model(model_id);
  try {
    const HeatMap map = posterior(*ens, *phrase);
    json scores = json::array();
    for (std::size_t i = 0; i < map.scores.size(); ++i) {
      const CellId cell = map.grid.cell_at(i);
      scores.push_back(json::array({cell.row, cell.col, map.scores[i]}));
    }
    json top = json::array();
    for (const auto &ranked : top_cells(map, k)) {
      top.push_back({{"row", ranked.cell.row}, {"col", ranked.cell.col}, {"score", ranked.score}});
    }
    return json_reply(200, {{"model", model_id},
                            {"phrase", map.phrase},
                            {"rows", map.grid.rows()},
                            {"cols", map.grid.cols()},
                            {"scores", std::move(scores)},
                            {"degenerate", map.degenerate},
                            {"top", std::move(top)}});
  } catch (const Error &e) {
    return reply_for(e);
  }
}

Reply GeoService::get_heatmap_geojson(const std::optional<std::string> &phrase,
                                      const std::string &model_id) {
  ++requests_;
  if (!phrase) return error_reply(400, "bad-request", "missing 'phrase' parameter");
  auto ens = find(model_id);
  if (!ens) return unknown_model(model_id);
  try {
    const HeatMap map = posterior(*ens, *phrase);
    return {200, "application/geo+json", heatmap_geojson(map).dump()};
  } catch (const Error &e) {
    return reply_for(e);
  }
}

Reply GeoService::post_zoom(const std::string &body) {
  ++requests_;
  const json request = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (request.is_discarded() || !request.is_object()) {
    return error_reply(400, "bad-request", "body must be a JSON object");
  }
  ZoomKey key;
  try {
    key = {request.value("model", std::string(kRootId)), request.at("row").get<int>(),
           request.at("col").get<int>(), request.value("rows", 10), request.value("cols", 10)};
  } catch (const json::exception &e) {
    return error_reply(400, "bad-request", std::string("bad zoom request: ") + e.what());
  }
  const auto &[parent_id, row, col, rows, cols] = key;

  auto parent = find(parent_id);
  if (!parent) return unknown_model(parent_id);

  // One build per (parent, cell, shape) at a time; later callers reuse it.
  std::shared_ptr<std::mutex> build_lock;
  {
    std::lock_guard guard(build_locks_mutex_);
    auto &slot = build_locks_[key];
    if (!slot) slot = std::make_shared<std::mutex>();
    build_lock = slot;
  }
  std::lock_guard build_guard(*build_lock);

  auto zoom_reply = [&](const std::string &id, const GridSpec &grid) {
    return json_reply(200, {{"model", id}, {"bbox", bbox_json(grid.bbox())},
                            {"rows", grid.rows()}, {"cols", grid.cols()}});
  };
  {
    std::shared_lock lock(mutex_);
    auto cached = zoom_index_.find(key);
    if (cached != zoom_index_.end()) {
      const Entry &entry = models_.at(cached->second);
      entry.last_used->store(++clock_);
      return zoom_reply(cached->second, entry.ensemble->grid);
    }
  }

  std::shared_ptr<const ModelEnsemble> child;
  try {
    child = std::make_shared<const ModelEnsemble>(
        zoom(*parent, CellId{row, col}, rows, cols, BuildOptions{0, parent->created}));
  } catch (const Error &e) {
    return reply_for(e);
  }

  std::unique_lock lock(mutex_);
  if (!models_.contains(parent_id)) return unknown_model(parent_id);
  const std::string id = "z" + std::to_string(next_zoom_id_++);
  Entry entry;
  entry.ensemble = child;
  entry.parent = parent_id;
  entry.key = key;
  entry.last_used = std::make_shared<std::atomic<std::uint64_t>>(++clock_);
  models_.emplace(id, std::move(entry));
  zoom_index_[key] = id;
  evict_locked(id);
  return zoom_reply(id, child->grid);
}

std::size_t GeoService::child_count_locked(const std::string &model_id) const {
  return std::count_if(models_.begin(), models_.end(),
                       [&](const auto &kv) { return kv.second.parent == model_id; });
}

void GeoService::evict_locked(const std::string &keep) {
  while (models_.size() - 1 > options_.zoom_cache) {
    // Least recently used leaf, so every survivor keeps its ancestors. The
    // model just created is never the victim.
    auto victim = models_.end();
    std::uint64_t oldest = std::numeric_limits<std::uint64_t>::max();
    for (auto it = models_.begin(); it != models_.end(); ++it) {
      if (it->first == kRootId || it->first == keep || child_count_locked(it->first) != 0) {
        continue;
      }
      const std::uint64_t used = it->second.last_used->load();
      if (used < oldest) {
        oldest = used;
        victim = it;
      }
    }
    if (victim == models_.end()) return;
    if (victim->second.key) zoom_index_.erase(*victim->second.key);
    models_.erase(victim);
  }
}

Reply GeoService::delete_zoom(const std::string &model_id) {
  ++requests_;
  if (model_id == kRootId) return error_reply(400, "root-immutable", "the root model cannot be deleted");
  std::unique_lock lock(mutex_);
  if (!models_.contains(model_id)) return unknown_model(model_id);

  std::vector<std::string> doomed{model_id};
  for (std::size_t i = 0; i < doomed.size(); ++i) {
    for (const auto &[id, entry] : models_) {
      if (entry.parent == doomed[i]) doomed.push_back(id);
    }
  }
  for (const auto &id : doomed) {
    auto it = models_.find(id);
    if (it->second.key) zoom_index_.erase(*it->second.key);
    models_.erase(it);
  }
  return json_reply(200, {{"deleted", doomed}});
}

void GeoService::mount(httplib::Server &server) {
  if (options_.cors) {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(".*", [](const httplib::Request &, httplib::Response &res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });
  }
  auto model_of = [](const httplib::Request &req) {
    return param(req, "model").value_or(kRootId);
  };
  server.Get("/model", [this, model_of](const httplib::Request &req, httplib::Response &res) {
    send(res, get_model(model_of(req)));
  });
  server.Get("/query", [this, model_of](const httplib::Request &req, httplib::Response &res) {
    std::size_t k = 10;
    if (auto text = param(req, "k")) {
      try {
        k = static_cast<std::size_t>(std::stoul(*text));
      } catch (const std::logic_error &) {
        send(res, error_reply(400, "bad-request", "k must be a non-negative integer"));
        return;
      }
    }
    send(res, get_query(param(req, "phrase"), model_of(req), k));
  });
  server.Get("/heatmap.geojson",
             [this, model_of](const httplib::Request &req, httplib::Response &res) {
               send(res, get_heatmap_geojson(param(req, "phrase"), model_of(req)));
             });
  server.Post("/zoom", [this](const httplib::Request &req, httplib::Response &res) {
    send(res, post_zoom(req.body));
  });
  server.Delete(R"(/zoom/([^/]+))", [this](const httplib::Request &req, httplib::Response &res) {
    send(res, delete_zoom(req.matches[1]));
  });
  server.set_exception_handler(
      [](const httplib::Request &, httplib::Response &res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
          if (ep) std::rethrow_exception(ep);
        } catch (const std::exception &e) {
          message = e.what();
        } catch (...) {
        }
        send(res, error_reply(500, "internal", message));
      });
}

bool serve(const std::string &model_path, const std::string &bind_address, int port,
           const ServiceOptions &options) {
  GeoService service(load_model(model_path), options);
  httplib::Server server;
  service.mount(server);
  return server.listen(bind_address, port);
}

}  // namespace geoperc
