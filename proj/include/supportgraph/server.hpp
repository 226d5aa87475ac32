#pragma once

// Local JSON service behind `sgraph serve`: scene browsing, ground-truth graph
// storage and on-demand inference/comparison. Endpoints are listed in
// docs/endpoints.md.

#include "supportgraph/pipeline.hpp"
#include "supportgraph/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace httplib {
class Server;
}

namespace sg {

struct ServiceOptions {
  std::filesystem::path scenes_dir;
  std::filesystem::path graphs_dir;
  PriorTables priors;
  EngineConfig config;
  std::optional<LinearClassifier> classifier;
};

/// A response independent of the transport.
struct Reply {
  int status = 200;
  nlohmann::json body;
  std::string content_type = "application/json";
  std::string raw;  // used instead of `body` for binary payloads
};

/// Thread-safe. Reads may run concurrently; writes to one scene's graph are
/// serialised and carry a version counter.
class SceneService {
 public:
  explicit SceneService(ServiceOptions options);

  Reply list_scenes() const;
  Reply scene(const std::string& id) const;
  Reply image(const std::string& id) const;
  Reply detections(const std::string& id) const;
  Reply get_graph(const std::string& id) const;
  /// Body: a graph document, or {"version": v, "graph": {...}}. A stale
  /// version is rejected with 409; an invalid graph with 422.
  Reply put_graph(const std::string& id, const std::string& body);
  Reply infer(const std::string& id);
  Reply compare(const std::string& id);

 private:
  struct Entry {
    std::mutex write;
    std::uint64_t version = 0;
  };

  std::optional<std::filesystem::path> scene_path(const std::string& id) const;
  std::shared_ptr<const SceneBundle> load(const std::string& id) const;
  Entry& entry(const std::string& id);
  std::uint64_t version_of(const std::string& id) const;
  std::filesystem::path graph_path(const std::string& id) const;
  std::shared_ptr<const SceneGraph> hypothesis(const std::string& id, nlohmann::json* solution);

  ServiceOptions opt_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::string, std::shared_ptr<const SceneBundle>> scenes_;
  std::map<std::string, std::shared_ptr<const SceneGraph>> hypotheses_;
  mutable std::mutex entries_mutex_;
  std::map<std::string, std::unique_ptr<Entry>> entries_;
};

/// Valid scene ids are file stems made of [A-Za-z0-9._-].
bool valid_scene_id(const std::string& id);

/// 24-bit uncompressed BMP of the scene colour image (or depth when there is
/// no colour raster).
std::string scene_bitmap(const SceneBundle& scene);

void register_routes(httplib::Server& server, SceneService& service);

/// Blocks until the server stops.
void run_server(SceneService& service, const std::string& host, int port);

}  // namespace sg
