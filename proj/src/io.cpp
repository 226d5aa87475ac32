#include "supportgraph/io.hpp"

#include "supportgraph/error.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace sg {

using nlohmann::json;

namespace {

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

std::string at_index(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw InputError(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw InputError(join(path, key), "missing field");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw InputError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw InputError(path, "expected a finite number");
  return x;
}

long long integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw InputError(path, "expected an integer");
  return v.get<long long>();
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) throw InputError(path, "expected a string");
  return v.get<std::string>();
}

const json& array(const json& v, const std::string& path) {
  if (!v.is_array()) throw InputError(path, "expected an array");
  return v;
}

std::vector<double> numbers(const json& v, const std::string& path) {
  array(v, path);
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], at_index(path, i)));
  return out;
}

std::vector<std::string> strings(const json& v, const std::string& path) {
  array(v, path);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(text(v[i], at_index(path, i)));
  return out;
}

void check_schema(const json& doc, std::string_view expected) {
  const std::string got = text(field(doc, "schema", ""), "schema");
  if (got != expected)
    throw InputError("schema", "expected '" + std::string(expected) + "', got '" + got + "'");
}

Eigen::Vector3d vec3(const json& v, const std::string& path) {
  const auto xs = numbers(v, path);
  if (xs.size() != 3) throw InputError(path, "expected 3 components");
  return {xs[0], xs[1], xs[2]};
}

std::vector<Eigen::Vector3d> vec3_raster(const json& v, std::size_t count, const std::string& path) {
  array(v, path);
  if (v.size() != 3 * count)
    throw InputError(path, "expected " + std::to_string(3 * count) + " values, got " +
                               std::to_string(v.size()));
  std::vector<Eigen::Vector3d> out(count);
  for (std::size_t i = 0; i < count; ++i)
    for (int c = 0; c < 3; ++c) out[i][c] = number(v[3 * i + c], at_index(path, 3 * i + c));
  return out;
}

std::vector<int> label_raster(const json& v, std::size_t count, const std::string& path) {
  std::vector<int> out;
  out.reserve(count);
  if (v.is_object()) {
    const std::string enc = text(field(v, "encoding", path), join(path, "encoding"));
    if (enc != "rle") throw InputError(join(path, "encoding"), "unsupported encoding '" + enc + "'");
    const auto& runs = array(field(v, "runs", path), join(path, "runs"));
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const std::string rp = at_index(join(path, "runs"), r);
      array(runs[r], rp);
      if (runs[r].size() != 2) throw InputError(rp, "expected [label, count]");
      const long long label = integer(runs[r][0], rp + "[0]");
      const long long n = integer(runs[r][1], rp + "[1]");
      if (n <= 0) throw InputError(rp + "[1]", "run length must be positive");
      if (out.size() + static_cast<std::size_t>(n) > count)
        throw InputError(rp, "runs exceed the image size");
      out.insert(out.end(), static_cast<std::size_t>(n), static_cast<int>(label));
    }
  } else {
    array(v, path);
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(static_cast<int>(integer(v[i], at_index(path, i))));
  }
  if (out.size() != count)
    throw InputError(path, "expected " + std::to_string(count) + " labels, got " +
                               std::to_string(out.size()));
  return out;
}

json rle_encode(const std::vector<int>& labels) {
  json runs = json::array();
  std::size_t i = 0;
  while (i < labels.size()) {
    std::size_t j = i;
    while (j < labels.size() && labels[j] == labels[i]) ++j;
    runs.push_back({labels[i], j - i});
    i = j;
  }
  return {{"encoding", "rle"}, {"runs", runs}};
}

int supporter_id(const json& v, const std::string& path) {
  if (v.is_string()) {
    if (v.get<std::string>() == kHiddenName) return kHiddenId;
    throw InputError(path, "expected a detection id or \"hidden\"");
  }
  return static_cast<int>(integer(v, path));
}

json supporter_json(int id) { return id == kHiddenId ? json(kHiddenName) : json(id); }

SupportInput parse_support(const json& doc, const std::set<int>& ids, const std::string& path) {
  const std::string type = text(field(doc, "type", path), join(path, "type"));
  const auto& pairs = array(field(doc, "pairs", path), join(path, "pairs"));

  auto key_of = [&](const json& p, const std::string& pp) {
    PairKey key{static_cast<int>(integer(field(p, "supported", pp), join(pp, "supported"))),
                supporter_id(field(p, "supporter", pp), join(pp, "supporter"))};
    if (!ids.count(key.supported))
      throw InputError(join(pp, "supported"), "unknown detection id " + std::to_string(key.supported));
    if (key.supporter != kHiddenId && !ids.count(key.supporter))
      throw InputError(join(pp, "supporter"), "unknown detection id " + std::to_string(key.supporter));
    if (key.supporter == key.supported)
      throw InputError(pp, "an object cannot support itself");
    return key;
  };

  if (type == "probabilities") {
    PrecomputedSupport out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const std::string pp = at_index(join(path, "pairs"), i);
      const PairKey key = key_of(pairs[i], pp);
      const auto p = numbers(field(pairs[i], "p", pp), join(pp, "p"));
      if (p.size() != 3) throw InputError(join(pp, "p"), "expected [below, behind, none]");
      double sum = 0.0;
      for (double x : p) {
        if (x < 0.0 || x > 1.0) throw InputError(join(pp, "p"), "probabilities must lie in [0,1]");
        sum += x;
      }
      if (std::abs(sum - 1.0) > 1e-6)
        throw InputError(join(pp, "p"), "probabilities must sum to 1");
      if (!out.table.emplace(key, SupportDistribution{p[0], p[1], p[2]}).second)
        throw InputError(pp, "duplicate pair");
    }
    return out;
  }
  if (type == "features") {
    SupportFeatureTable out;
    out.classifier = parse_classifier(field(doc, "classifier", path), join(path, "classifier"));
    if (out.classifier.num_classes() != 3 || out.classifier.num_features() != kSupportFeatureDim)
      throw InputError(join(path, "classifier"), "support classifier must be 3 x 20");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const std::string pp = at_index(join(path, "pairs"), i);
      const PairKey key = key_of(pairs[i], pp);
      auto f = numbers(field(pairs[i], "f", pp), join(pp, "f"));
      if (f.size() != kSupportFeatureDim)
        throw InputError(join(pp, "f"), "expected 20 features");
      if (!out.table.emplace(key, std::move(f)).second) throw InputError(pp, "duplicate pair");
    }
    return out;
  }
  throw InputError(join(path, "type"), "expected 'probabilities' or 'features'");
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd probability_matrix(const json& v, std::size_t rows, std::size_t cols,
                                   const std::string& path) {
  array(v, path);
  if (v.size() != rows) throw InputError(path, "expected " + std::to_string(rows) + " rows");
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = numbers(v[r], at_index(path, r));
    if (row.size() != cols)
      throw InputError(at_index(path, r), "expected " + std::to_string(cols) + " columns");
    for (std::size_t c = 0; c < cols; ++c) {
      if (row[c] < 0.0 || row[c] > 1.0)
        throw InputError(at_index(at_index(path, r), c), "probability outside [0,1]");
      m(r, c) = row[c];
    }
  }
  return m;
}

}  // namespace

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("", path.string() + ": parse error: " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Scene

SceneBundle parse_scene(const json& doc) {
  check_schema(doc, kSceneSchema);
  SceneBundle s;
  s.scene_id = text(field(doc, "scene_id", ""), "scene_id");
  s.width = static_cast<int>(integer(field(doc, "width", ""), "width"));
  s.height = static_cast<int>(integer(field(doc, "height", ""), "height"));
  if (s.width <= 0 || s.height <= 0) throw InputError("width", "image size must be positive");
  const long long k = integer(field(doc, "num_classes", ""), "num_classes");
  if (k <= static_cast<long long>(kCeilingClass))
    throw InputError("num_classes", "vocabulary must include ground, wall and ceiling");
  s.num_classes = static_cast<std::size_t>(k);
  const std::size_t n_pix = s.pixel_count();

  const auto& dets = array(field(doc, "detections", ""), "detections");
  std::set<int> ids;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const std::string dp = at_index("detections", i);
    Detection d;
    const long long id = integer(field(dets[i], "id", dp), join(dp, "id"));
    if (id < 0) throw InputError(join(dp, "id"), "detection id must be non-negative");
    d.id = static_cast<int>(id);
    if (!ids.insert(d.id).second)
      throw InputError(join(dp, "id"), "duplicate detection id " + std::to_string(d.id));
    const auto b = numbers(field(dets[i], "bbox", dp), join(dp, "bbox"));
    if (b.size() != 4) throw InputError(join(dp, "bbox"), "expected [u0, v0, u1, v1]");
    d.bbox = {b[0], b[1], b[2], b[3]};
    if (!(d.bbox.u0 < d.bbox.u1) || !(d.bbox.v0 < d.bbox.v1))
      throw InputError(join(dp, "bbox"), "detection " + std::to_string(d.id) + ": need u0 < u1 and v0 < v1");
    if (d.bbox.u0 < 0 || d.bbox.v0 < 0 || d.bbox.u1 > s.width || d.bbox.v1 > s.height)
      throw InputError(join(dp, "bbox"), "detection " + std::to_string(d.id) + ": box outside the image");
    d.box_score = number(field(dets[i], "box_score", dp), join(dp, "box_score"));
    d.class_scores = numbers(field(dets[i], "class_scores", dp), join(dp, "class_scores"));
    if (d.class_scores.size() != s.num_classes)
      throw InputError(join(dp, "class_scores"),
                       "detection " + std::to_string(d.id) + ": expected " +
                           std::to_string(s.num_classes) + " class scores, got " +
                           std::to_string(d.class_scores.size()));
    for (double x : d.class_scores)
      if (x < 0.0) throw InputError(join(dp, "class_scores"), "scores must be non-negative");
    s.detections.push_back(std::move(d));
  }

  s.superpixels = label_raster(field(doc, "superpixels", ""), n_pix, "superpixels");
  {
    const int n_labels = s.superpixel_count();
    std::vector<char> seen(static_cast<std::size_t>(std::max(n_labels, 0)), 0);
    for (int l : s.superpixels) {
      if (l < 0) throw InputError("superpixels", "labels must be non-negative");
      seen[static_cast<std::size_t>(l)] = 1;
    }
    for (int l = 0; l < n_labels; ++l)
      if (!seen[static_cast<std::size_t>(l)])
        throw InputError("superpixels", "labels must be contiguous from 0; missing " + std::to_string(l));
  }

  s.points = vec3_raster(field(doc, "points", ""), n_pix, "points");
  s.normals = vec3_raster(field(doc, "normals", ""), n_pix, "normals");
  for (std::size_t i = 0; i < n_pix; ++i)
    if (std::abs(s.normals[i].norm() - 1.0) > 1e-3)
      throw InputError(at_index("normals", 3 * i), "normal of pixel " + std::to_string(i) + " is not unit length");

  if (const auto it = doc.find("rgb"); it != doc.end() && !it->is_null()) {
    array(*it, "rgb");
    if (it->size() != 3 * n_pix) throw InputError("rgb", "expected 3 values per pixel");
    s.rgb.resize(n_pix);
    for (std::size_t i = 0; i < n_pix; ++i)
      for (int c = 0; c < 3; ++c) {
        const long long x = integer((*it)[3 * i + c], at_index("rgb", 3 * i + c));
        if (x < 0 || x > 255) throw InputError(at_index("rgb", 3 * i + c), "channel outside 0..255");
        s.rgb[i][c] = static_cast<std::uint8_t>(x);
      }
  }

  if (const auto it = doc.find("lines"); it != doc.end()) {
    array(*it, "lines");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string lp = at_index("lines", i);
      LineSegment line;
      line.direction = vec3(field((*it)[i], "direction", lp), join(lp, "direction"));
      const double len = line.direction.norm();
      if (!(len > 0.0)) throw InputError(join(lp, "direction"), "zero-length direction");
      if (std::abs(len - 1.0) > 1e-12) line.direction /= len;  // keeps re-saving stable
      if (const auto ny = (*it)[i].find("near_y"); ny != (*it)[i].end() && !ny->is_null()) {
        if (!ny->is_boolean()) throw InputError(join(lp, "near_y"), "expected a boolean");
        line.near_y = ny->get<bool>();
      }
      s.lines.push_back(line);
    }
  }

  s.scene_scores = numbers(field(doc, "scene_scores", ""), "scene_scores");
  if (s.scene_scores.empty()) throw InputError("scene_scores", "expected at least one scene score");
  for (double x : s.scene_scores)
    if (x < 0.0) throw InputError("scene_scores", "scores must be non-negative");

  if (const auto it = doc.find("support"); it != doc.end() && !it->is_null())
    s.support = parse_support(*it, ids, "support");
  return s;
}

SceneBundle load_scene(const std::filesystem::path& path) { return parse_scene(read_json(path)); }

json scene_to_json(const SceneBundle& s) {
  json doc;
  doc["schema"] = kSceneSchema;
  doc["scene_id"] = s.scene_id;
  doc["width"] = s.width;
  doc["height"] = s.height;
  doc["num_classes"] = s.num_classes;
  json dets = json::array();
  for (const auto& d : s.detections)
    dets.push_back({{"id", d.id},
                    {"bbox", {d.bbox.u0, d.bbox.v0, d.bbox.u1, d.bbox.v1}},
                    {"box_score", d.box_score},
                    {"class_scores", d.class_scores}});
  doc["detections"] = dets;
  doc["superpixels"] = rle_encode(s.superpixels);
  auto flat = [](const std::vector<Eigen::Vector3d>& v) {
    json a = json::array();
    for (const auto& p : v) {
      a.push_back(p.x());
      a.push_back(p.y());
      a.push_back(p.z());
    }
    return a;
  };
  doc["points"] = flat(s.points);
  doc["normals"] = flat(s.normals);
  if (!s.rgb.empty()) {
    json a = json::array();
    for (const auto& c : s.rgb)
      for (auto ch : c) a.push_back(static_cast<int>(ch));
    doc["rgb"] = a;
  }
  json lines = json::array();
  for (const auto& l : s.lines) {
    json jl = {{"direction", {l.direction.x(), l.direction.y(), l.direction.z()}}};
    if (l.near_y) jl["near_y"] = *l.near_y;
    lines.push_back(jl);
  }
  doc["lines"] = lines;
  doc["scene_scores"] = s.scene_scores;
  if (const auto* pre = std::get_if<PrecomputedSupport>(&s.support)) {
    json pairs = json::array();
    for (const auto& [k, p] : pre->table)
      pairs.push_back({{"supported", k.supported}, {"supporter", supporter_json(k.supporter)},
                       {"p", {p[0], p[1], p[2]}}});
    doc["support"] = {{"type", "probabilities"}, {"pairs", pairs}};
  } else if (const auto* feat = std::get_if<SupportFeatureTable>(&s.support)) {
    json pairs = json::array();
    for (const auto& [k, f] : feat->table)
      pairs.push_back({{"supported", k.supported}, {"supporter", supporter_json(k.supporter)}, {"f", f}});
    doc["support"] = {{"type", "features"},
                      {"pairs", pairs},
                      {"classifier", classifier_to_json(feat->classifier)}};
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Priors

PriorTables parse_priors(const json& doc) {
  check_schema(doc, kPriorsSchema);
  PriorTables p;
  p.classes = strings(field(doc, "classes", ""), "classes");
  p.scenes = strings(field(doc, "scenes", ""), "scenes");
  if (p.classes.size() <= kCeilingClass || p.classes[kGroundClass] != kGroundName ||
      p.classes[kWallClass] != kWallName || p.classes[kCeilingClass] != kCeilingName)
    throw InputError("classes", "vocabulary must start with ground, wall, ceiling");
  if (p.scenes.empty()) throw InputError("scenes", "at least one scene type required");
  if (std::set<std::string>(p.classes.begin(), p.classes.end()).size() != p.classes.size())
    throw InputError("classes", "duplicate class name");
  if (std::set<std::string>(p.scenes.begin(), p.scenes.end()).size() != p.scenes.size())
    throw InputError("scenes", "duplicate scene name");
  for (const auto& c : p.classes)
    if (c == kHiddenName) throw InputError("classes", "'hidden' is reserved");
  p.class_given_scene = probability_matrix(field(doc, "class_given_scene", ""), p.scenes.size(),
                                           p.classes.size(), "class_given_scene");
  p.support_prior = probability_matrix(field(doc, "support_prior", ""), p.classes.size(),
                                       p.classes.size(), "support_prior");
  return p;
}

PriorTables load_priors(const std::filesystem::path& path) { return parse_priors(read_json(path)); }

json priors_to_json(const PriorTables& p) {
  return {{"schema", kPriorsSchema},
          {"classes", p.classes},
          {"scenes", p.scenes},
          {"class_given_scene", matrix_json(p.class_given_scene)},
          {"support_prior", matrix_json(p.support_prior)}};
}

// ---------------------------------------------------------------------------
// Classifier

LinearClassifier parse_classifier(const json& doc, const std::string& path) {
  if (const auto it = doc.find("schema"); it != doc.end() && text(*it, join(path, "schema")) != kClassifierSchema)
    throw InputError(join(path, "schema"), "expected '" + std::string(kClassifierSchema) + "'");
  const long long k = integer(field(doc, "classes", path), join(path, "classes"));
  const long long d = integer(field(doc, "features", path), join(path, "features"));
  if (k <= 0 || d <= 0) throw InputError(path, "dimensions must be positive");
  const auto w = numbers(field(doc, "weights", path), join(path, "weights"));
  const auto b = numbers(field(doc, "bias", path), join(path, "bias"));
  if (w.size() != static_cast<std::size_t>(k * d))
    throw InputError(join(path, "weights"), "expected classes x features row-major values");
  if (b.size() != static_cast<std::size_t>(k)) throw InputError(join(path, "bias"), "expected one bias per class");
  LinearClassifier clf;
  clf.weights.resize(k, d);
  for (long long r = 0; r < k; ++r)
    for (long long c = 0; c < d; ++c) clf.weights(r, c) = w[static_cast<std::size_t>(r * d + c)];
  clf.bias = Eigen::Map<const Eigen::VectorXd>(b.data(), k);
  return clf;
}

LinearClassifier load_classifier(const std::filesystem::path& path) {
  return parse_classifier(read_json(path));
}

json classifier_to_json(const LinearClassifier& clf) {
  std::vector<double> w;
  for (Eigen::Index r = 0; r < clf.weights.rows(); ++r)
    for (Eigen::Index c = 0; c < clf.weights.cols(); ++c) w.push_back(clf.weights(r, c));
  return {{"schema", kClassifierSchema},
          {"classes", clf.weights.rows()},
          {"features", clf.weights.cols()},
          {"weights", w},
          {"bias", std::vector<double>(clf.bias.data(), clf.bias.data() + clf.bias.size())}};
}

// ---------------------------------------------------------------------------
// Scene graphs

json graph_to_json(const SceneGraph& g) {
  json vs = json::array();
  for (const auto& v : g.vertices) {
    json jv = {{"id", v.id},
               {"kind", to_string(v.kind)},
               {"label", v.label},
               {"z_min", v.z_min},
               {"z_max", v.z_max},
               {"attributes", v.attributes}};
    jv["detection_id"] = v.detection_id ? json(*v.detection_id) : json(nullptr);
    jv["bbox"] = v.bbox ? json({v.bbox->u0, v.bbox->v0, v.bbox->u1, v.bbox->v1}) : json(nullptr);
    vs.push_back(jv);
  }
  json se = json::array();
  for (const auto& e : g.support_edges)
    se.push_back({{"from", e.from}, {"to", e.to}, {"kind", to_string(e.kind)}});
  json de = json::array();
  for (const auto& e : g.default_edges) de.push_back({{"from", e.from}, {"to", e.to}});
  json pe = json::array();
  for (const auto& e : g.position_edges)
    pe.push_back({{"from", e.from}, {"to", e.to}, {"relation", to_string(e.relation)}});
  return {{"schema", kGraphSchema},
          {"scene_type", g.scene_type},
          {"vertices", vs},
          {"support_edges", se},
          {"default_edges", de},
          {"position_edges", pe}};
}

SceneGraph graph_from_json(const json& doc) {
  check_schema(doc, kGraphSchema);
  SceneGraph g;
  g.scene_type = text(field(doc, "scene_type", ""), "scene_type");
  const auto& vs = array(field(doc, "vertices", ""), "vertices");
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const std::string vp = at_index("vertices", i);
    Vertex v;
    v.id = static_cast<int>(integer(field(vs[i], "id", vp), join(vp, "id")));
    const std::string kind = text(field(vs[i], "kind", vp), join(vp, "kind"));
    const auto k = vertex_kind_from(kind);
    if (!k) throw InputError(join(vp, "kind"), "unknown vertex kind '" + kind + "'");
    v.kind = *k;
    v.label = text(field(vs[i], "label", vp), join(vp, "label"));
    if (const auto it = vs[i].find("detection_id"); it != vs[i].end() && !it->is_null())
      v.detection_id = static_cast<int>(integer(*it, join(vp, "detection_id")));
    if (const auto it = vs[i].find("bbox"); it != vs[i].end() && !it->is_null()) {
      const auto b = numbers(*it, join(vp, "bbox"));
      if (b.size() != 4) throw InputError(join(vp, "bbox"), "expected 4 values");
      v.bbox = BoundingBox{b[0], b[1], b[2], b[3]};
    }
    if (const auto it = vs[i].find("z_min"); it != vs[i].end()) v.z_min = number(*it, join(vp, "z_min"));
    if (const auto it = vs[i].find("z_max"); it != vs[i].end()) v.z_max = number(*it, join(vp, "z_max"));
    if (const auto it = vs[i].find("attributes"); it != vs[i].end())
      v.attributes = strings(*it, join(vp, "attributes"));
    g.vertices.push_back(std::move(v));
  }
  auto endpoints = [](const json& e, const std::string& ep) {
    return std::pair{static_cast<int>(integer(field(e, "from", ep), join(ep, "from"))),
                     static_cast<int>(integer(field(e, "to", ep), join(ep, "to")))};
  };
  const auto& se = array(field(doc, "support_edges", ""), "support_edges");
  for (std::size_t i = 0; i < se.size(); ++i) {
    const std::string ep = at_index("support_edges", i);
    const auto [from, to] = endpoints(se[i], ep);
    const std::string kind = text(field(se[i], "kind", ep), join(ep, "kind"));
    const auto k = edge_kind_from(kind);
    if (!k) throw InputError(join(ep, "kind"), "unknown edge kind '" + kind + "'");
    g.support_edges.push_back({from, to, *k});
  }
  if (const auto it = doc.find("default_edges"); it != doc.end()) {
    array(*it, "default_edges");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto [from, to] = endpoints((*it)[i], at_index("default_edges", i));
      g.default_edges.push_back({from, to});
    }
  }
  if (const auto it = doc.find("position_edges"); it != doc.end()) {
    array(*it, "position_edges");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string ep = at_index("position_edges", i);
      const auto [from, to] = endpoints((*it)[i], ep);
      const std::string rel = text(field((*it)[i], "relation", ep), join(ep, "relation"));
      const auto r = relation_from(rel);
      if (!r) throw InputError(join(ep, "relation"), "unknown relation '" + rel + "'");
      g.position_edges.push_back({from, to, *r});
    }
  }
  return g;
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string graph_to_dot(const SceneGraph& g) {
  std::ostringstream os;
  os << "digraph scene_graph {\n  rankdir=BT;\n  node [shape=box, fontname=\"Helvetica\"];\n";
  for (const auto& v : g.vertices) {
    std::string label = v.label;
    if (!v.attributes.empty()) {
      label += "\\n(";
      for (std::size_t i = 0; i < v.attributes.size(); ++i)
        label += (i ? ", " : "") + v.attributes[i];
      label += ")";
    }
    os << "  v" << v.id << " [label=\"" << dot_escape(label) << "\"";
    if (v.kind == VertexKind::root) os << ", shape=doubleoctagon";
    if (v.kind == VertexKind::hidden) os << ", style=dashed";
    if (v.kind == VertexKind::structure) os << ", style=filled, fillcolor=lightgrey";
    os << "];\n";
  }
  for (const auto& e : g.support_edges) {
    os << "  v" << e.from << " -> v" << e.to << " [color=darkgreen, penwidth=2";
    if (e.kind != EdgeKind::layer) os << ", label=\"" << to_string(e.kind) << "\"";
    os << "];\n";
  }
  for (const auto& e : g.default_edges)
    os << "  v" << e.from << " -> v" << e.to << " [color=darkgreen, style=dotted];\n";
  for (const auto& e : g.position_edges)
    os << "  v" << e.from << " -> v" << e.to << " [color=blue, style=dashed, constraint=false, label=\""
       << to_string(e.relation) << "\"];\n";
  os << "}\n";
  return os.str();
}

void save_graph(const SceneGraph& graph, const std::filesystem::path& path, GraphFormat format) {
  const auto problems = validate_graph(graph);
  if (!problems.empty()) throw InputError("graph", problems.front());
  if (format == GraphFormat::json)
    write_text(path, graph_to_json(graph).dump(2) + "\n");
  else
    write_text(path, graph_to_dot(graph));
}

SceneGraph load_graph(const std::filesystem::path& path) { return graph_from_json(read_json(path)); }

}  // namespace sg
