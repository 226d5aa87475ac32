#include "supportgraph/server.hpp"

#include "supportgraph/error.hpp"
#include "supportgraph/graph_eval.hpp"
#include "supportgraph/io.hpp"
#include "supportgraph/scene_graph.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <limits>

namespace sg {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

Reply error_reply(int status, const std::string& message, json extra = json::object()) {
  Reply r;
  r.status = status;
  r.body = std::move(extra);
  r.body["error"] = message;
  return r;
}

Reply not_found(const std::string& id) { return error_reply(404, "unknown scene '" + id + "'"); }

void put_u16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& s, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) s.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

json detection_json(const Detection& d, const std::vector<std::string>& classes) {
  const std::size_t top = d.top_class();
  return {{"id", d.id},
          {"bbox", {d.bbox.u0, d.bbox.v0, d.bbox.u1, d.bbox.v1}},
          {"box_score", d.box_score},
          {"top_class", top < classes.size() ? classes[top] : std::to_string(top)},
          {"class_score", d.max_class_score()}};
}

// write to a sibling temp file, then rename over the target
void atomic_write(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  write_text(tmp, text);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot replace " + path.string() + ": " + ec.message());
}

}  // namespace

bool valid_scene_id(const std::string& id) {
  if (id.empty() || id.size() > 128 || id == "." || id == "..") return false;
  return std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '.' || c == '_' || c == '-';
  });
}

std::string scene_bitmap(const SceneBundle& s) {
  const int w = s.width, h = s.height;
  const int stride = (3 * w + 3) / 4 * 4;
  std::vector<double> gray;
  if (s.rgb.empty()) {
    // depth as gray: near is bright
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : s.points) {
      lo = std::min(lo, p.z());
      hi = std::max(hi, p.z());
    }
    for (const auto& p : s.points) gray.push_back(hi > lo ? 255.0 * (hi - p.z()) / (hi - lo) : 128.0);
  }
  std::string out;
  const std::uint32_t data = static_cast<std::uint32_t>(stride * h);
  out += "BM";
  put_u32(out, 54 + data);
  put_u32(out, 0);
  put_u32(out, 54);
  put_u32(out, 40);
  put_u32(out, static_cast<std::uint32_t>(w));
  put_u32(out, static_cast<std::uint32_t>(h));
  put_u16(out, 1);
  put_u16(out, 24);
  put_u32(out, 0);
  put_u32(out, data);
  put_u32(out, 2835);
  put_u32(out, 2835);
  put_u32(out, 0);
  put_u32(out, 0);
  for (int v = h - 1; v >= 0; --v) {  // bottom-up rows
    std::string row;
    for (int u = 0; u < w; ++u) {
      const std::size_t p = static_cast<std::size_t>(v) * static_cast<std::size_t>(w) + static_cast<std::size_t>(u);
      if (!s.rgb.empty()) {
        row.push_back(static_cast<char>(s.rgb[p][2]));
        row.push_back(static_cast<char>(s.rgb[p][1]));
        row.push_back(static_cast<char>(s.rgb[p][0]));
      } else {
        const char g = static_cast<char>(static_cast<std::uint8_t>(std::clamp(gray[p], 0.0, 255.0)));
        row.append(3, g);
      }
    }
    row.resize(static_cast<std::size_t>(stride), '\0');
    out += row;
  }
  return out;
}

SceneService::SceneService(ServiceOptions options) : opt_(std::move(options)) {
  if (!fs::is_directory(opt_.scenes_dir))
    throw IoError("scenes directory does not exist: " + opt_.scenes_dir.string());
  if (!fs::is_directory(opt_.graphs_dir))
    throw IoError("graphs directory does not exist: " + opt_.graphs_dir.string());
  // graphs already on disk start at version 1
  for (const auto& f : fs::directory_iterator(opt_.graphs_dir))
    if (f.path().extension() == ".json") entry(f.path().stem().string()).version = 1;
}

std::optional<fs::path> SceneService::scene_path(const std::string& id) const {
  if (!valid_scene_id(id)) return std::nullopt;
  const fs::path p = opt_.scenes_dir / (id + ".json");
  if (!fs::is_regular_file(p)) return std::nullopt;
  return p;
}

std::shared_ptr<const SceneBundle> SceneService::load(const std::string& id) const {
  {
    std::lock_guard lock(cache_mutex_);
    if (const auto it = scenes_.find(id); it != scenes_.end()) return it->second;
  }
  const auto path = scene_path(id);
  if (!path) return nullptr;
  auto scene = std::make_shared<const SceneBundle>(load_scene(*path));
  std::lock_guard lock(cache_mutex_);
  return scenes_.emplace(id, std::move(scene)).first->second;
}

SceneService::Entry& SceneService::entry(const std::string& id) {
  std::lock_guard lock(entries_mutex_);
  auto& e = entries_[id];
  if (!e) e = std::make_unique<Entry>();
  return *e;
}

std::uint64_t SceneService::version_of(const std::string& id) const {
  std::lock_guard lock(entries_mutex_);
  const auto it = entries_.find(id);
  return it == entries_.end() ? 0 : it->second->version;
}

fs::path SceneService::graph_path(const std::string& id) const { return opt_.graphs_dir / (id + ".json"); }

Reply SceneService::list_scenes() const {
  std::vector<fs::path> files;
  for (const auto& f : fs::directory_iterator(opt_.scenes_dir))
    if (f.is_regular_file() && f.path().extension() == ".json" && valid_scene_id(f.path().stem().string()))
      files.push_back(f.path());
  std::sort(files.begin(), files.end());
  json list = json::array();
  for (const auto& f : files) {
    const std::string id = f.stem().string();
    json item = {{"id", id}, {"has_graph", fs::exists(graph_path(id))}, {"version", version_of(id)}};
    try {
      const auto s = load(id);
      item["width"] = s->width;
      item["height"] = s->height;
      item["detections"] = s->detections.size();
    } catch (const std::exception& e) {
      item["error"] = e.what();
    }
    list.push_back(item);
  }
  Reply r;
  r.body = {{"scenes", list}};
  return r;
}

Reply SceneService::scene(const std::string& id) const {
  const auto s = load(id);
  if (!s) return not_found(id);
  Reply r;
  r.body = {{"id", id},
            {"scene_id", s->scene_id},
            {"width", s->width},
            {"height", s->height},
            {"classes", opt_.priors.classes},
            {"scene_types", opt_.priors.scenes},
            {"scene_type", scene_posterior(s->scene_scores, opt_.priors.scenes).name},
            {"has_graph", fs::exists(graph_path(id))},
            {"version", version_of(id)}};
  return r;
}

Reply SceneService::image(const std::string& id) const {
  const auto s = load(id);
  if (!s) return not_found(id);
  Reply r;
  r.content_type = "image/bmp";
  r.raw = scene_bitmap(*s);
  return r;
}

Reply SceneService::detections(const std::string& id) const {
  const auto s = load(id);
  if (!s) return not_found(id);
  json dets = json::array();
  for (const auto& d : s->detections) dets.push_back(detection_json(d, opt_.priors.classes));
  Reply r;
  r.body = {{"id", id}, {"width", s->width}, {"height", s->height}, {"detections", dets}};
  return r;
}

Reply SceneService::get_graph(const std::string& id) const {
  if (!scene_path(id)) return not_found(id);
  const fs::path p = graph_path(id);
  if (!fs::exists(p)) return error_reply(404, "no ground-truth graph for '" + id + "'", {{"version", 0}});
  Reply r;
  r.body = {{"id", id}, {"version", version_of(id)}, {"graph", read_json(p)}};
  return r;
}

Reply SceneService::put_graph(const std::string& id, const std::string& body) {
  if (!scene_path(id)) return not_found(id);
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    return error_reply(400, std::string("request body is not JSON: ") + e.what());
  }
  std::optional<std::uint64_t> expected;
  json graph_doc = doc;
  if (doc.is_object() && doc.contains("graph")) {
    graph_doc = doc["graph"];
    if (doc.contains("version")) {
      if (!doc["version"].is_number_unsigned()) return error_reply(400, "version must be a non-negative integer");
      expected = doc["version"].get<std::uint64_t>();
    }
  }
  SceneGraph g;
  try {
    g = graph_from_json(graph_doc);
  } catch (const InputError& e) {
    return error_reply(400, e.what(), {{"path", e.path()}});
  }
  const auto problems = validate_graph(g);
  if (!problems.empty()) {
    const std::string first = problems.front();
    return error_reply(422, "graph violates " + first.substr(0, first.find(':')),
                       {{"invariant", first.substr(0, first.find(':'))}, {"violations", problems}});
  }

  Entry& e = entry(id);
  std::lock_guard lock(e.write);
  if (expected && *expected != e.version)
    return error_reply(409, "version conflict", {{"version", e.version}});
  atomic_write(graph_path(id), graph_to_json(g).dump(2) + "\n");
  {
    std::lock_guard vlock(entries_mutex_);
    ++e.version;
  }
  Reply r;
  r.body = {{"id", id}, {"version", e.version}};
  return r;
}

std::shared_ptr<const SceneGraph> SceneService::hypothesis(const std::string& id, json* solution) {
  const auto s = load(id);
  if (!s) return nullptr;
  const LinearClassifier* clf = opt_.classifier ? &*opt_.classifier : nullptr;
  const auto r = run_inference(*s, opt_.priors, opt_.config, clf);
  auto g = std::make_shared<const SceneGraph>(graph_from_inference(r, opt_.priors, opt_.config));
  if (solution) *solution = solution_to_json(r, opt_.priors, opt_.config);
  std::lock_guard lock(cache_mutex_);
  hypotheses_[id] = g;
  return g;
}

Reply SceneService::infer(const std::string& id) {
  if (!scene_path(id)) return not_found(id);
  json solution;
  const auto g = hypothesis(id, &solution);
  Reply r;
  r.body = {{"id", id}, {"solution", solution}, {"graph", graph_to_json(*g)}};
  return r;
}

Reply SceneService::compare(const std::string& id) {
  if (!scene_path(id)) return not_found(id);
  const fs::path p = graph_path(id);
  if (!fs::exists(p)) return error_reply(404, "no ground-truth graph for '" + id + "'");
  const SceneGraph gt = load_graph(p);
  std::shared_ptr<const SceneGraph> hyp;
  {
    std::lock_guard lock(cache_mutex_);
    if (const auto it = hypotheses_.find(id); it != hypotheses_.end()) hyp = it->second;
  }
  if (!hyp) hyp = hypothesis(id, nullptr);

  const auto report = compare_graphs(*hyp, gt);
  // cells that differ, for highlighting
  auto rooted = [](SceneGraph g) {
    for (auto& v : g.vertices)
      if (v.kind == VertexKind::root) v.label = "<root>";
    return g;
  };
  const SceneGraph h2 = rooted(*hyp), g2 = rooted(gt);
  std::vector<std::string> labels = matrix_labels(g2);
  for (const auto& l : matrix_labels(h2))
    if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
  const auto mh = graph_to_matrix(h2, labels);
  const auto mg = graph_to_matrix(g2, labels);
  json diff = json::array();
  for (Eigen::Index i = 0; i < mh.rows(); ++i)
    for (Eigen::Index j = 0; j < mh.cols(); ++j)
      if ((mh(i, j) != 0) != (mg(i, j) != 0))
        diff.push_back({{"supported", labels[static_cast<std::size_t>(i)]},
                        {"supporting", labels[static_cast<std::size_t>(j)]},
                        {"hypothesis", mh(i, j)},
                        {"ground_truth", mg(i, j)}});
  Reply r;
  r.body = {{"id", id},
            {"report",
             {{"cheeger_distance", report.cheeger_distance},
              {"spectral_distance", report.spectral_distance},
              {"naive_distance", report.naive_distance},
              {"hypothesis_disconnected", report.hypothesis_disconnected},
              {"ground_truth_disconnected", report.ground_truth_disconnected},
              {"degenerate_lambda2", report.degenerate_lambda2}}},
            {"labels", labels},
            {"differences", diff},
            {"hypothesis", graph_to_json(*hyp)},
            {"ground_truth", graph_to_json(gt)}};
  return r;
}

void register_routes(httplib::Server& server, SceneService& service) {
  auto send = [](httplib::Response& res, const Reply& r) {
    res.status = r.status;
    if (!r.raw.empty()) res.set_content(r.raw, r.content_type);
    else res.set_content(r.body.dump(), r.content_type);
  };
  // maps library exceptions to statuses
  auto guarded = [send](auto fn) {
    return [send, fn](const httplib::Request& req, httplib::Response& res) {
      try {
        send(res, fn(req));
      } catch (const InputError& e) {
        send(res, error_reply(400, e.what(), {{"path", e.path()}}));
      } catch (const ConfigError& e) {
        send(res, error_reply(500, e.what()));
      } catch (const SolverError& e) {
        send(res, error_reply(500, e.what()));
      } catch (const std::exception& e) {
        send(res, error_reply(500, e.what()));
      }
    };
  };
  auto id = [](const httplib::Request& req) { return req.path_params.at("id"); };

  server.Get("/api/scenes", guarded([&service](const httplib::Request&) { return service.list_scenes(); }));
  server.Get("/api/scenes/:id", guarded([&service, id](const httplib::Request& q) { return service.scene(id(q)); }));
  server.Get("/api/scenes/:id/image",
             guarded([&service, id](const httplib::Request& q) { return service.image(id(q)); }));
  server.Get("/api/scenes/:id/detections",
             guarded([&service, id](const httplib::Request& q) { return service.detections(id(q)); }));
  server.Get("/api/scenes/:id/graph",
             guarded([&service, id](const httplib::Request& q) { return service.get_graph(id(q)); }));
  server.Put("/api/scenes/:id/graph",
             guarded([&service, id](const httplib::Request& q) { return service.put_graph(id(q), q.body); }));
  server.Post("/api/scenes/:id/infer",
              guarded([&service, id](const httplib::Request& q) { return service.infer(id(q)); }));
  server.Get("/api/scenes/:id/compare",
             guarded([&service, id](const httplib::Request& q) { return service.compare(id(q)); }));
}

void run_server(SceneService& service, const std::string& host, int port) {
  httplib::Server server;
  register_routes(server, service);
  if (!server.listen(host, port)) throw IoError("cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace sg
