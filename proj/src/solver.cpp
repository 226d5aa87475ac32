#include "supportgraph/solver.hpp"

#include "supportgraph/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <queue>

namespace sg {

ObjectAssignment IPModel::decode_column(std::size_t col) const {
  ObjectAssignment a;
  if (col == ground_column()) {
    a.supporter = SupporterRef::ground_self();
    return a;
  }
  const bool behind = col < n + 1;
  const std::size_t s = behind ? col : col - (n + 1);
  a.type = behind ? SupportType::behind : SupportType::below;
  a.supporter = s == n ? SupporterRef::hidden() : SupporterRef::visible(s);
  return a;
}

Assignment IPModel::decode(const std::vector<double>& x) const {
  Assignment out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best_col = 0;
    for (std::size_t c = 1; c < columns(); ++c)
      if (x[sp(i, c)] > x[sp(i, best_col)]) best_col = c;
    std::size_t best_cls = 0;
    for (std::size_t l = 1; l < k; ++l)
      if (x[cls(i, l)] > x[cls(i, best_cls)]) best_cls = l;
    out[i] = decode_column(best_col);
    out[i].class_index = best_cls;
  }
  return out;
}

std::vector<double> IPModel::encode(const Assignment& a) const {
  std::vector<double> x(lp.num_variables(), 0.0);
  std::vector<std::size_t> col(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = a[i].supporter;
    col[i] = s.is_ground_self() ? ground_column()
             : s.is_hidden() ? hidden_column(a[i].type)
                             : column(s.object, a[i].type);
    x[sp(i, col[i])] = 1.0;
    x[cls(i, a[i].class_index)] = 1.0;
  }
  for (const auto& c : chi)
    if (col[c.i] == c.column && a[c.i].class_index == c.lambda &&
        a[decode_column(c.column).supporter.object].class_index == c.upsilon)
      x[c.var] = 1.0;
  return x;
}

namespace {

double weighted(double alpha, double term) { return term >= kSaturated ? kSaturated : alpha * term; }

// A cost split into its saturated-term count and finite remainder.
struct Cost {
  double finite = 0.0;
  double saturated = 0.0;

  Cost& operator+=(double term) {
    if (term >= kSaturated) saturated += 1.0;
    else finite += term;
    return *this;
  }
};

}  // namespace

IPModel build_ip(const SupportProblem& p, bool soft) {
  p.validate();
  IPModel m;
  m.n = p.n;
  m.k = p.k;
  const std::size_t n = p.n;
  const std::size_t cols = m.columns();
  const auto& w = p.weights;
  LinearProgram& lp = m.lp;

  // Hard mode fixes every variable carrying a saturated term; soft mode keeps
  // them and records the count so the solver can minimise it first.
  auto add = [&](const Cost& theta, bool forbidden, std::string name) {
    const bool fixed = forbidden || (!soft && theta.saturated > 0.0);
    const std::size_t v = lp.add_variable(theta.finite, 0.0, fixed ? 0.0 : 1.0, std::move(name));
    if (soft) m.saturation.push_back(theta.saturated);
    return v;
  };
  // c_class of a visible supporter saturates whatever the classes are
  auto too_high = [&](std::size_t i, std::size_t s) { return p.bottom[s] > p.top[i]; };

  // B_SP
  m.b_sp.resize(n * cols);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < cols; ++c) {
      const ObjectAssignment a = m.decode_column(c);
      Cost theta;
      bool forbidden = false;
      ObjectAssignment probe = a;
      probe.class_index = kGroundClass == 0 ? 1 : 0;  // any non-ground class
      if (a.supporter.is_object() && a.supporter.object == i) {
        forbidden = true;
      } else if (a.supporter.is_hidden()) {
        theta += e_support(p, i, probe);
        theta += weighted(w.alpha_support, w.k_hidden);
      } else if (a.supporter.is_object()) {
        theta += e_support(p, i, probe);
        theta += weighted(w.alpha_distance, c_dist(p, i, a));
        if (too_high(i, a.supporter.object)) theta += kSaturated;
      }
      m.b_sp[i * cols + c] = add(theta, forbidden, "bsp_" + std::to_string(i) + "_" + std::to_string(c));
    }
  }

  // B_C
  m.b_c.resize(n * p.k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < p.k; ++l) {
      Cost theta;
      theta += e_class(p, i, l);
      if (l == kGroundClass) {
        const double cc = strictly_lowest(p, i)
                              ? neg_log(p.class_prob(static_cast<Eigen::Index>(i), kGroundClass))
                              : kSaturated;
        ObjectAssignment self{SupporterRef::ground_self(), SupportType::below, kGroundClass};
        theta += weighted(w.alpha_class, cc);
        theta += weighted(w.alpha_support, c_support(p, i, self));
      }
      m.b_c[i * p.k + l] = add(theta, false, "bc_" + std::to_string(i) + "_" + std::to_string(l));
    }

  auto is_fixed = [&](std::size_t var) { return lp.upper[var] <= 0.0; };

  // chi, only for visible supporters
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < cols; ++c) {
      const ObjectAssignment a = m.decode_column(c);
      if (!a.supporter.is_object() || a.supporter.object == i) continue;
      if (is_fixed(m.sp(i, c))) continue;
      const std::size_t s = a.supporter.object;
      const bool high = too_high(i, s);  // already charged on B_SP
      for (std::size_t l = 0; l < p.k; ++l) {
        if (l == kGroundClass || is_fixed(m.cls(i, l))) continue;
        for (std::size_t u = 0; u < p.k; ++u) {
          if (is_fixed(m.cls(s, u))) continue;
          Cost theta;
          if (!high)
            theta += weighted(w.alpha_class, neg_log(p.support_prior(static_cast<Eigen::Index>(u),
                                                                     static_cast<Eigen::Index>(l))));
          if (!soft && theta.saturated > 0.0) continue;
          const std::size_t var =
              add(theta, false, "chi_" + std::to_string(i) + "_" + std::to_string(c) + "_" +
                                    std::to_string(l) + "_" + std::to_string(u));
          m.chi.push_back({i, c, l, u, var});
        }
      }
    }

  // group chi by (i, column), (i, lambda), (i, supporter, upsilon)
  std::vector<std::vector<std::size_t>> by_col(n * cols), by_cls(n * p.k), by_sup(n * n * p.k);
  for (std::size_t q = 0; q < m.chi.size(); ++q) {
    const auto& c = m.chi[q];
    by_col[c.i * cols + c.column].push_back(c.var);
    by_cls[c.i * p.k + c.lambda].push_back(c.var);
    const std::size_t s = m.decode_column(c.column).supporter.object;
    by_sup[(c.i * n + s) * p.k + c.upsilon].push_back(c.var);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const std::string tag = std::to_string(i);
    std::vector<std::pair<std::size_t, double>> row;
    for (std::size_t c = 0; c < cols; ++c) row.emplace_back(m.sp(i, c), 1.0);
    lp.add_row(row, RowSense::eq, 1.0, "one_support_" + tag);

    row.clear();
    for (std::size_t l = 0; l < p.k; ++l) row.emplace_back(m.cls(i, l), 1.0);
    lp.add_row(row, RowSense::eq, 1.0, "one_class_" + tag);

    for (std::size_t c = 0; c < cols; ++c) {
      const ObjectAssignment a = m.decode_column(c);
      if (!a.supporter.is_object() || a.supporter.object == i) continue;
      row.clear();
      for (std::size_t v : by_col[i * cols + c]) row.emplace_back(v, 1.0);
      row.emplace_back(m.sp(i, c), -1.0);
      lp.add_row(row, RowSense::eq, 0.0, "chi_support_" + tag + "_" + std::to_string(c));
    }

    for (std::size_t l = 0; l < p.k; ++l) {
      row.clear();
      for (std::size_t v : by_cls[i * p.k + l]) row.emplace_back(v, 1.0);
      row.emplace_back(m.cls(i, l), -1.0);
      lp.add_row(row, RowSense::le, 0.0, "chi_class_" + tag + "_" + std::to_string(l));
    }

    lp.add_row({{m.sp(i, m.ground_column()), 1.0}, {m.cls(i, kGroundClass), -1.0}}, RowSense::eq, 0.0,
               "ground_self_" + tag);

    // the supporter's class must agree with upsilon
    for (std::size_t s = 0; s < n; ++s) {
      if (s == i) continue;
      for (std::size_t u = 0; u < p.k; ++u) {
        row.clear();
        for (std::size_t v : by_sup[(i * n + s) * p.k + u]) row.emplace_back(v, 1.0);
        row.emplace_back(m.cls(s, u), -1.0);
        lp.add_row(row, RowSense::le, 0.0,
                   "chi_supporter_" + tag + "_" + std::to_string(s) + "_" + std::to_string(u));
      }
    }
  }
  return m;
}

Assignment hidden_fallback(const SupportProblem& p) {
  Assignment a(p.n);
  for (std::size_t i = 0; i < p.n; ++i) {
    std::size_t best = kGroundClass == 0 ? 1 : 0;
    for (std::size_t l = 0; l < p.k; ++l)
      if (l != kGroundClass && e_class(p, i, l) < e_class(p, i, best)) best = l;
    ObjectAssignment below{SupporterRef::hidden(), SupportType::below, best};
    ObjectAssignment behind{SupporterRef::hidden(), SupportType::behind, best};
    a[i] = e_support(p, i, behind) < e_support(p, i, below) ? behind : below;
  }
  return a;
}

namespace {

struct Node {
  double bound;
  std::size_t id;
  std::vector<double> lower, upper;
  std::vector<double> x;
};

struct NodeOrder {
  bool operator()(const Node* a, const Node* b) const {
    if (a->bound != b->bound) return a->bound > b->bound;
    return a->id > b->id;
  }
};

// Most fractional variable among `vars`; ties go to the lowest index.
std::size_t most_fractional(const std::vector<double>& x, const std::vector<std::size_t>& vars, double tol) {
  std::size_t best = std::numeric_limits<std::size_t>::max();
  double best_f = tol;
  for (std::size_t v : vars) {
    const double f = std::min(x[v], 1.0 - x[v]);
    if (f > best_f + 1e-15 || (f > tol && std::abs(f - best_f) <= 1e-15 && v < best)) {
      best_f = f;
      best = v;
    }
  }
  return best;
}

// Energy with saturated terms dropped, summed without the 1e12 offsets.
double finite_energy(const SupportProblem& p, const Assignment& a) {
  double total = 0.0;
  auto add = [&](double t) {
    if (t < kSaturated) total += t;
  };
  for (std::size_t i = 0; i < p.n; ++i) {
    add(e_support(p, i, a[i]));
    add(e_class(p, i, a[i].class_index));
    add(weighted(p.weights.alpha_class, c_class(p, i, a)));
    add(weighted(p.weights.alpha_distance, c_dist(p, i, a[i])));
    add(weighted(p.weights.alpha_support, c_support(p, i, a[i])));
  }
  return total;
}

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct Search {
  bool root_feasible = false;
  double root_bound = 0.0;
  double incumbent = std::numeric_limits<double>::infinity();
  Assignment best;
};

// Best-bound branch-and-bound over `lp`. Integral points are scored by
// `score`, which must agree with the LP objective on integral points.
template <typename Score>
Search branch_and_bound(const IPModel& m, const LinearProgram& lp, const SolverOptions& opt, std::size_t& nodes,
                        Score score) {
  std::vector<std::size_t> b_vars(m.b_sp);
  b_vars.insert(b_vars.end(), m.b_c.begin(), m.b_c.end());
  std::sort(b_vars.begin(), b_vars.end());
  std::vector<std::size_t> chi_vars;
  for (const auto& c : m.chi) chi_vars.push_back(c.var);

  LinearProgram work = lp;
  auto solve_node = [&](const std::vector<double>& lo, const std::vector<double>& hi) {
    work.lower = lo;
    work.upper = hi;
    LPSolution s = solve_lp(work, opt.lp);
    ++nodes;
    if (s.status == LPStatus::iteration_limit) throw SolverError("solver: LP iteration limit");
    return s;
  };

  Search out;
  const LPSolution root = solve_node(lp.lower, lp.upper);
  if (root.status != LPStatus::optimal) return out;
  out.root_feasible = true;
  out.root_bound = root.objective;

  std::vector<std::unique_ptr<Node>> pool;
  std::priority_queue<Node*, std::vector<Node*>, NodeOrder> open;
  std::size_t next_id = 0;
  pool.push_back(std::make_unique<Node>(Node{root.objective, next_id++, lp.lower, lp.upper, root.x}));
  open.push(pool.back().get());

  while (!open.empty()) {
    Node* node = open.top();
    open.pop();
    if (node->bound >= out.incumbent - opt.prune_tol) continue;

    std::size_t v = most_fractional(node->x, b_vars, 1e-7);
    if (v == kNone) v = most_fractional(node->x, chi_vars, 1e-7);
    if (v == kNone) {
      Assignment a = m.decode(node->x);
      const double e = score(a);
      if (e < out.incumbent) {
        out.incumbent = e;
        out.best = std::move(a);
      }
      continue;
    }
    for (double val : {0.0, 1.0}) {
      std::vector<double> lo = node->lower;
      std::vector<double> hi = node->upper;
      lo[v] = hi[v] = val;
      if (nodes >= opt.max_nodes) throw SolverError("solver: branch-and-bound node limit reached");
      LPSolution s = solve_node(lo, hi);
      if (s.status != LPStatus::optimal || s.objective >= out.incumbent - opt.prune_tol) continue;
      pool.push_back(std::make_unique<Node>(Node{s.objective, next_id++, std::move(lo), std::move(hi), std::move(s.x)}));
      open.push(pool.back().get());
    }
    node->x.clear();
    node->x.shrink_to_fit();
  }
  return out;
}

}  // namespace

SupportSolution solve_support(const SupportProblem& p, const SolverOptions& opt) {
  SupportSolution out;
  if (p.n == 0) return out;

  const IPModel hard = build_ip(p);
  auto energy = [&](const Assignment& a) { return total_energy(p, a).total; };
  Search s = branch_and_bound(hard, hard.lp, opt, out.nodes, energy);
  if (s.root_feasible) out.lower_bound = s.root_bound;

  if (s.best.empty()) {
    // Nothing finite exists. Minimise the number of saturated terms first,
    // then the finite remainder among assignments achieving that count.
    const IPModel soft = build_ip(p, true);
    LinearProgram count = soft.lp;
    count.cost = soft.saturation;
    auto saturated = [&](const Assignment& a) { return static_cast<double>(total_energy(p, a).saturated_terms); };
    const Search first = branch_and_bound(soft, count, opt, out.nodes, saturated);
    if (!first.best.empty()) {
      LinearProgram rest = soft.lp;
      std::vector<std::pair<std::size_t, double>> row;
      for (std::size_t v = 0; v < soft.saturation.size(); ++v)
        if (soft.saturation[v] > 0.0) row.emplace_back(v, soft.saturation[v]);
      rest.add_row(row, RowSense::le, first.incumbent + 0.5, "saturated_count");
      auto residual = [&](const Assignment& a) { return finite_energy(p, a); };
      s = branch_and_bound(soft, rest, opt, out.nodes, residual);
      out.lower_bound = static_cast<double>(kSaturated) * first.root_bound + s.root_bound;
    }
    out.warnings.push_back("solver: no finite-energy assignment exists");
  }

  if (s.best.empty()) {
    out.objects = hidden_fallback(p);
    out.warnings.push_back("solver: no integral point found; every object assigned hidden support");
  } else {
    out.objects = std::move(s.best);
  }
  out.energy = total_energy(p, out.objects);
  if (out.energy.saturated_terms > 0 && out.warnings.empty())
    out.warnings.push_back("solver: solution contains saturated terms");
  return out;
}

SupportSolution exhaustive_minimize(const SupportProblem& p, std::size_t max_n) {
  p.validate();
  SupportSolution out;
  if (p.n == 0) return out;
  if (p.n > max_n)
    throw SolverError("exhaustive: " + std::to_string(p.n) + " objects exceed the limit of " +
                      std::to_string(max_n));
  const double vectors = std::pow(static_cast<double>(p.k), static_cast<double>(p.n));
  if (vectors * p.n * (2.0 * p.n + 2.0) > 5e8) throw SolverError("exhaustive: enumeration too large");

  const std::size_t n = p.n;
  std::vector<ObjectAssignment> options;  // supporter/type choices for non-ground classes
  Assignment a(n);
  Assignment best;
  double best_e = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> cls(n, 0);

  auto object_cost = [&](std::size_t i) {
    const auto& ai = a[i];
    return e_support(p, i, ai) + e_class(p, i, ai.class_index) +
           weighted(p.weights.alpha_class, c_class(p, i, a)) +
           weighted(p.weights.alpha_distance, c_dist(p, i, ai)) +
           weighted(p.weights.alpha_support, c_support(p, i, ai));
  };

  for (;;) {
    for (std::size_t i = 0; i < n; ++i) a[i].class_index = cls[i];
    // with classes fixed the energy separates over objects
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ObjectAssignment keep;
      double e_best = std::numeric_limits<double>::infinity();
      auto consider = [&](SupporterRef s, SupportType t) {
        a[i].supporter = s;
        a[i].type = t;
        const double e = object_cost(i);
        if (e < e_best) {
          e_best = e;
          keep = a[i];
        }
      };
      if (cls[i] == kGroundClass) {
        consider(SupporterRef::ground_self(), SupportType::below);
      } else {
        for (std::size_t s = 0; s <= n; ++s) {
          if (s == i) continue;
          const SupporterRef ref = s == n ? SupporterRef::hidden() : SupporterRef::visible(s);
          consider(ref, SupportType::below);
          consider(ref, SupportType::behind);
        }
      }
      a[i] = keep;
      total += e_best;
    }
    if (total < best_e) {
      best_e = total;
      best = a;
    }
    std::size_t d = 0;
    while (d < n && ++cls[d] == p.k) cls[d++] = 0;
    if (d == n) break;
  }
  out.objects = best;
  out.energy = total_energy(p, best);
  out.lower_bound = out.energy.total;
  return out;
}

}  // namespace sg
