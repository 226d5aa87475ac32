#include "supportgraph/graph_eval.hpp"

#include "supportgraph/error.hpp"
#include "supportgraph/linalg.hpp"
#include "supportgraph/scene_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

namespace sg {

namespace {

constexpr const char* kRootLabel = "<root>";
constexpr const char* kHiddenLabel = "<hidden>";

// vertices that take part in the relaxed graph, in vertex order
std::vector<const Vertex*> relaxed_vertices(const SceneGraph& graph) {
  const bool hidden = hidden_in_use(graph);
  std::vector<const Vertex*> out;
  for (const auto& v : graph.vertices)
    if (v.kind != VertexKind::hidden || hidden) out.push_back(&v);
  return out;
}

// u2 placed on the full vertex set; zero outside the analysed component
Eigen::VectorXd embedded_u2(const UndirectedGraph& g, bool* degenerate) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
  const auto comp = largest_component(g);
  if (comp.size() < 2) return u;
  const auto spec = lambda2_randomwalk(induced(g, comp));
  if (degenerate && !std::isnan(spec.lambda3) && std::abs(spec.lambda2 - spec.lambda3) < 1e-9)
    *degenerate = true;
  for (std::size_t k = 0; k < comp.size(); ++k)
    u[static_cast<Eigen::Index>(comp[k])] = spec.u2[static_cast<Eigen::Index>(k)];
  return u;
}

double gap(const UndirectedGraph& g) {
  const auto b = cheeger_bounds(g);
  return b.upper - b.lower;
}

}  // namespace

std::vector<std::string> canonical_labels(const SceneGraph& graph) {
  std::vector<std::string> out(graph.vertices.size());
  // class -> (centre u, centre v, vertex id, vertex position)
  std::map<std::string, std::vector<std::tuple<int, double, double, int, std::size_t>>> groups;
  for (std::size_t k = 0; k < graph.vertices.size(); ++k) {
    const auto& v = graph.vertices[k];
    if (v.kind == VertexKind::root) {
      out[k] = kRootLabel;
    } else if (v.kind == VertexKind::hidden) {
      out[k] = kHiddenLabel;
    } else if (v.bbox) {
      groups[v.label].emplace_back(0, 0.5 * (v.bbox->u0 + v.bbox->u1), 0.5 * (v.bbox->v0 + v.bbox->v1), v.id, k);
    } else {
      // no box: after the boxed ones, by id
      groups[v.label].emplace_back(1, 0.0, 0.0, v.id, k);
    }
  }
  for (auto& [label, members] : groups) {
    std::sort(members.begin(), members.end());
    for (std::size_t o = 0; o < members.size(); ++o)
      out[std::get<4>(members[o])] = label + "#" + std::to_string(o);
  }
  return out;
}

UndirectedGraph relax_undirected(const SceneGraph& graph) {
  const auto verts = relaxed_vertices(graph);
  const auto canon = canonical_labels(graph);
  UndirectedGraph g;
  std::map<int, Eigen::Index> index;
  for (const Vertex* v : verts) {
    index[v->id] = static_cast<Eigen::Index>(g.labels.size());
    g.labels.push_back(canon[static_cast<std::size_t>(v - graph.vertices.data())]);
  }
  const auto n = static_cast<Eigen::Index>(g.labels.size());
  g.adjacency = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : graph.support_edges) {
    const auto a = index.find(e.from);
    const auto b = index.find(e.to);
    if (a == index.end() || b == index.end() || a->second == b->second) continue;
    g.adjacency(a->second, b->second) = g.adjacency(b->second, a->second) = 1.0;
  }
  return g;
}

UndirectedGraph from_adjacency(const Eigen::MatrixXd& adjacency) {
  if (adjacency.rows() != adjacency.cols()) throw InputError("adjacency", "matrix must be square");
  UndirectedGraph g;
  const auto n = adjacency.rows();
  g.adjacency = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g.labels.push_back("v" + std::to_string(i));
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && (adjacency(i, j) != 0.0 || adjacency(j, i) != 0.0)) g.adjacency(i, j) = 1.0;
  }
  return g;
}

std::vector<std::vector<std::size_t>> components(const UndirectedGraph& g) {
  const std::size_t n = g.size();
  std::vector<int> comp(n, -1);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    const int c = static_cast<int>(out.size());
    out.emplace_back();
    std::vector<std::size_t> stack{s};
    comp[s] = c;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      out.back().push_back(v);
      for (std::size_t w = 0; w < n; ++w)
        if (comp[w] < 0 && g.adjacency(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(w)) != 0.0) {
          comp[w] = c;
          stack.push_back(w);
        }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

UndirectedGraph induced(const UndirectedGraph& g, const std::vector<std::size_t>& vertices) {
  UndirectedGraph out;
  const auto m = static_cast<Eigen::Index>(vertices.size());
  out.adjacency.resize(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    out.labels.push_back(g.labels[vertices[static_cast<std::size_t>(a)]]);
    for (Eigen::Index b = 0; b < m; ++b)
      out.adjacency(a, b) = g.adjacency(static_cast<Eigen::Index>(vertices[static_cast<std::size_t>(a)]),
                                        static_cast<Eigen::Index>(vertices[static_cast<std::size_t>(b)]));
  }
  return out;
}

std::vector<std::size_t> largest_component(const UndirectedGraph& g) {
  const auto comps = components(g);
  std::vector<std::size_t> best;
  for (const auto& c : comps)
    if (c.size() > best.size()) best = c;  // components come ordered by smallest member
  return best;
}

RandomWalkSpectrum lambda2_randomwalk(const UndirectedGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  if (n < 2) throw InputError("graph", "random walk spectrum needs at least two vertices");
  const Eigen::VectorXd d = g.degrees();
  if ((d.array() <= 0.0).any()) throw InputError("graph", "random walk matrix undefined for an isolated vertex");
  const Eigen::VectorXd s = d.array().rsqrt();
  const Eigen::MatrixXd m = s.asDiagonal() * g.adjacency * s.asDiagonal();
  const auto eig = jacobi_eigen(m);

  RandomWalkSpectrum out;
  out.values = eig.values;
  out.lambda2 = eig.values[1];
  out.lambda3 = n > 2 ? eig.values[2] : std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd u = s.asDiagonal() * eig.vectors.col(1);
  u.normalize();
  Eigen::Index arg = 0;
  for (Eigen::Index k = 1; k < n; ++k)
    if (std::abs(u[k]) > std::abs(u[arg]) + 1e-12) arg = k;
  if (u[arg] < 0) u = -u;
  out.u2 = u;
  return out;
}

CheegerBounds cheeger_bounds(const UndirectedGraph& g) {
  CheegerBounds b;
  const auto comp = largest_component(g);
  b.disconnected = comp.size() != g.size();
  if (comp.size() < 2) return b;  // nothing to cut
  const auto spec = lambda2_randomwalk(b.disconnected ? induced(g, comp) : g);
  b.lambda2 = spec.lambda2;
  b.lower = (1.0 - spec.lambda2) / 2.0;
  b.upper = std::sqrt(std::max(0.0, 2.0 - 2.0 * spec.lambda2));
  return b;
}

double cheeger_constant_bruteforce(const UndirectedGraph& g) {
  const std::size_t n = g.size();
  if (n < 2 || n > 24) throw InputError("graph", "brute force Cheeger constant needs 2..24 vertices");
  const Eigen::VectorXd d = g.degrees();
  const double total = d.sum();
  double best = std::numeric_limits<double>::infinity();
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  for (std::uint64_t mask = 1; mask < full; ++mask) {
    double vol = 0.0, cut = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask >> i & 1)) continue;
      vol += d[static_cast<Eigen::Index>(i)];
      for (std::size_t j = 0; j < n; ++j)
        if (!(mask >> j & 1)) cut += g.adjacency(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    const double denom = std::min(vol, total - vol);
    if (denom <= 0.0) continue;
    best = std::min(best, cut / denom);
  }
  return best;
}

double cheeger_distance(const UndirectedGraph& hyp, const UndirectedGraph& gt) {
  return std::abs(gap(gt) - gap(hyp));
}

double spectral_distance(const UndirectedGraph& hyp, const UndirectedGraph& gt) {
  if (gt.size() == 0) throw InputError("graph", "ground truth graph is empty");
  std::vector<std::string> labels = gt.labels;
  for (const auto& l : hyp.labels)
    if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
  const auto n = static_cast<Eigen::Index>(labels.size());

  auto lift = [&](const UndirectedGraph& g) {
    const Eigen::VectorXd u = embedded_u2(g, nullptr);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const auto at = std::find(labels.begin(), labels.end(), g.labels[k]) - labels.begin();
      out[at] = u[static_cast<Eigen::Index>(k)];
    }
    return out;
  };
  const Eigen::VectorXd u = lift(hyp);
  const Eigen::VectorXd w = lift(gt);
  const Eigen::MatrixXd diff = u * u.transpose() - w * w.transpose();
  return diff.norm() / std::sqrt(static_cast<double>(gt.size()));
}

double naive_distance(const Eigen::MatrixXi& hyp, const Eigen::MatrixXi& gt) {
  if (hyp.rows() != gt.rows() || hyp.cols() != gt.cols())
    throw InputError("matrix", "naive distance needs matrices over the same class index");
  long x = 0, o = 0;
  for (Eigen::Index i = 0; i < hyp.rows(); ++i)
    for (Eigen::Index j = 0; j < hyp.cols(); ++j) {
      const bool a = hyp(i, j) != 0;
      const bool b = gt(i, j) != 0;
      x += a != b;
      o += a || b;
    }
  return o == 0 ? 0.0 : static_cast<double>(x) / static_cast<double>(o);
}

SimilarityReport compare_graphs(const SceneGraph& hyp_in, const SceneGraph& gt_in) {
  // scene type mismatches are not part of the structural comparison
  auto normalise = [](SceneGraph g) {
    for (auto& v : g.vertices)
      if (v.kind == VertexKind::root) v.label = kRootLabel;
    return g;
  };
  const SceneGraph hyp = normalise(hyp_in);
  const SceneGraph gt = normalise(gt_in);

  SimilarityReport r;
  const auto h = relax_undirected(hyp);
  const auto g = relax_undirected(gt);
  r.hypothesis_disconnected = largest_component(h).size() != h.size();
  r.ground_truth_disconnected = largest_component(g).size() != g.size();
  r.cheeger_distance = cheeger_distance(h, g);
  r.spectral_distance = spectral_distance(h, g);
  bool degenerate = false;
  embedded_u2(h, &degenerate);
  embedded_u2(g, &degenerate);
  r.degenerate_lambda2 = degenerate;

  std::vector<std::string> labels = matrix_labels(gt);
  for (const auto& l : matrix_labels(hyp))
    if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
  r.naive_distance = naive_distance(graph_to_matrix(hyp, labels), graph_to_matrix(gt, labels));
  return r;
}

BatchReport batch_report(const std::vector<SimilarityReport>& reports) {
  if (reports.empty()) throw InputError("pairs", "batch report needs at least one pair");
  BatchReport b;
  b.pairs = reports.size();
  const double n = static_cast<double>(reports.size());
  auto stats = [&](auto field, double& mean, double& var) {
    double s = 0.0;
    for (const auto& r : reports) s += r.*field;
    mean = s / n;
    double q = 0.0;
    for (const auto& r : reports) q += (r.*field - mean) * (r.*field - mean);
    var = q / n;
  };
  stats(&SimilarityReport::cheeger_distance, b.cheeger_mean, b.cheeger_variance);
  stats(&SimilarityReport::spectral_distance, b.spectral_mean, b.spectral_variance);
  stats(&SimilarityReport::naive_distance, b.naive_mean, b.naive_variance);
  for (const auto& r : reports) {
    b.disconnected += r.hypothesis_disconnected || r.ground_truth_disconnected;
    b.degenerate += r.degenerate_lambda2;
  }
  return b;
}

std::string format_report(const BatchReport& b) {
  char buf[128];
  std::ostringstream os;
  std::snprintf(buf, sizeof buf, "%-10s %10s %10s\n", "Measure", "Mean", "Variance");
  os << buf;
  auto row = [&](const char* name, double m, double v) {
    std::snprintf(buf, sizeof buf, "%-10s %10.4f %10.4f\n", name, m, v);
    os << buf;
  };
  row("Cheeger", b.cheeger_mean, b.cheeger_variance);
  row("Spectral", b.spectral_mean, b.spectral_variance);
  row("Naive", b.naive_mean, b.naive_variance);
  os << "pairs: " << b.pairs;
  if (b.disconnected) os << ", disconnected: " << b.disconnected;
  if (b.degenerate) os << ", degenerate lambda2: " << b.degenerate;
  os << "\n";
  return os.str();
}

}  // namespace sg
