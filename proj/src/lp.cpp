#include "supportgraph/lp.hpp"

#include "supportgraph/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sg {

std::size_t LinearProgram::add_variable(double c, double lo, double hi, std::string name) {
  cost.push_back(c);
  lower.push_back(lo);
  upper.push_back(hi);
  names.push_back(std::move(name));
  return cost.size() - 1;
}

void LinearProgram::add_row(std::vector<std::pair<std::size_t, double>> terms, RowSense sense,
                            double rhs, std::string name) {
  rows.push_back({std::move(terms), sense, rhs, std::move(name)});
}

std::string_view to_string(LPStatus s) {
  switch (s) {
    case LPStatus::optimal: return "optimal";
    case LPStatus::infeasible: return "infeasible";
    case LPStatus::unbounded: return "unbounded";
    case LPStatus::iteration_limit: return "iteration_limit";
  }
  return "infeasible";
}

namespace {

// Tableau simplex over columns with bounds [0, ub]; nonbasic columns sit at
// either bound.
class Tableau {
 public:
  Tableau(std::size_t m, std::size_t n) : m_(m), n_(n), t_(m * n, 0.0), ub_(n, kInf), at_upper_(n, 0),
                                          row_of_(n, -1), basis_(m, 0), xb_(m, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return t_[r * n_ + c]; }
  double at(std::size_t r, std::size_t c) const { return t_[r * n_ + c]; }

  void set_basic(std::size_t r, std::size_t c, double value) {
    basis_[r] = c;
    row_of_[c] = static_cast<long>(r);
    xb_[r] = value;
  }

  double value(std::size_t c) const {
    if (row_of_[c] >= 0) return xb_[static_cast<std::size_t>(row_of_[c])];
    return at_upper_[c] ? ub_[c] : 0.0;
  }

  LPStatus run(const std::vector<double>& cost, const LPOptions& opt, std::size_t& iterations) {
    std::vector<double> d(cost);
    for (std::size_t r = 0; r < m_; ++r) {
      const double cb = cost[basis_[r]];
      if (cb == 0.0) continue;
      const double* row = &t_[r * n_];
      for (std::size_t j = 0; j < n_; ++j) d[j] -= cb * row[j];
    }
    bool bland = opt.bland_only;
    std::size_t degenerate = 0;
    for (;;) {
      if (iterations >= opt.max_iterations) return LPStatus::iteration_limit;

      // pricing
      std::size_t q = n_;
      double best = 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        if (row_of_[j] >= 0 || ub_[j] <= 0.0) continue;
        const double gain = at_upper_[j] ? d[j] : -d[j];
        if (gain <= opt.optimality_tol) continue;
        if (bland) {
          q = j;
          break;
        }
        if (gain > best) {
          best = gain;
          q = j;
        }
      }
      if (q == n_) return LPStatus::optimal;
      const double dir = at_upper_[q] ? -1.0 : 1.0;

      // ratio test
      double step = ub_[q];
      std::size_t leave = m_;
      bool leave_upper = false;
      for (std::size_t r = 0; r < m_; ++r) {
        const double alpha = dir * at(r, q);
        double lim;
        bool hits_upper;
        if (alpha > opt.pivot_tol) {
          lim = std::max(0.0, xb_[r]) / alpha;
          hits_upper = false;
        } else if (alpha < -opt.pivot_tol && std::isfinite(ub_[basis_[r]])) {
          lim = std::max(0.0, ub_[basis_[r]] - xb_[r]) / -alpha;
          hits_upper = true;
        } else {
          continue;
        }
        bool take = false;
        if (leave == m_) {
          take = lim < step;  // on a tie with ub_[q], prefer the bound flip
        } else if (lim < step - 1e-12) {
          take = true;
        } else if (lim <= step + 1e-12) {
          if (bland)
            take = basis_[r] < basis_[leave];
          else
            take = std::abs(alpha) > std::abs(at(leave, q)) + 1e-12 ||
                   (std::abs(std::abs(alpha) - std::abs(at(leave, q))) <= 1e-12 && basis_[r] < basis_[leave]);
        }
        if (take) {
          step = lim;
          leave = r;
          leave_upper = hits_upper;
        }
      }
      if (!std::isfinite(step)) return LPStatus::unbounded;
      ++iterations;

      degenerate = step <= 1e-12 ? degenerate + 1 : 0;
      if (degenerate >= opt.degenerate_switch) bland = true;

      for (std::size_t r = 0; r < m_; ++r) xb_[r] -= dir * step * at(r, q);
      if (leave == m_) {  // bound flip
        at_upper_[q] = !at_upper_[q];
        continue;
      }
      const double entering = (at_upper_[q] ? ub_[q] : 0.0) + dir * step;
      const std::size_t out = basis_[leave];
      row_of_[out] = -1;
      at_upper_[out] = leave_upper;
      at_upper_[q] = 0;
      pivot(leave, q, d);
      set_basic(leave, q, entering);
    }
  }

  void pivot(std::size_t r, std::size_t q, std::vector<double>& d) {
    double* pr = &t_[r * n_];
    const double inv = 1.0 / pr[q];
    for (std::size_t j = 0; j < n_; ++j) pr[j] *= inv;
    pr[q] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* pi = &t_[i * n_];
      const double f = pi[q];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n_; ++j) pi[j] -= f * pr[j];
      pi[q] = 0.0;
    }
    const double f = d[q];
    if (f != 0.0) {
      for (std::size_t j = 0; j < n_; ++j) d[j] -= f * pr[j];
      d[q] = 0.0;
    }
  }

  std::size_t m_, n_;
  std::vector<double> t_;
  std::vector<double> ub_;
  std::vector<char> at_upper_;
  std::vector<long> row_of_;
  std::vector<std::size_t> basis_;
  std::vector<double> xb_;
};

}  // namespace

LPSolution solve_lp(const LinearProgram& lp, const LPOptions& opt) {
  const std::size_t n0 = lp.num_variables();
  if (lp.lower.size() != n0 || lp.upper.size() != n0) throw SolverError("lp: bound vectors size mismatch");
  LPSolution sol;
  sol.x.assign(n0, 0.0);
  for (std::size_t j = 0; j < n0; ++j) {
    if (!std::isfinite(lp.lower[j])) throw SolverError("lp: lower bounds must be finite");
    if (lp.upper[j] < lp.lower[j]) {
      sol.status = LPStatus::infeasible;
      return sol;
    }
  }

  // Fixed variables are folded into the right-hand side.
  std::vector<long> col_of(n0, -1);
  std::vector<std::size_t> var_of;
  for (std::size_t j = 0; j < n0; ++j)
    if (lp.upper[j] > lp.lower[j]) {
      col_of[j] = static_cast<long>(var_of.size());
      var_of.push_back(j);
    }
  const std::size_t ns = var_of.size();
  const std::size_t m = lp.rows.size();

  std::vector<double> b(m);
  std::vector<double> sign(m, 1.0);
  std::vector<long> slack_col(m, -1);
  std::vector<double> slack_coef(m, 0.0);
  std::size_t ncols = ns;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = lp.rows[i];
    double rhs = row.rhs;
    for (const auto& [j, a] : row.terms) {
      if (j >= n0) throw SolverError("lp: row references unknown variable");
      rhs -= a * lp.lower[j];
    }
    if (row.sense != RowSense::eq) {
      slack_col[i] = static_cast<long>(ncols++);
      slack_coef[i] = row.sense == RowSense::le ? 1.0 : -1.0;
    }
    if (rhs < 0.0) sign[i] = -1.0;
    b[i] = sign[i] * rhs;
  }
  std::vector<long> art_col(m, -1);
  std::size_t n_art = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (!(slack_col[i] >= 0 && sign[i] * slack_coef[i] > 0.0)) {
      art_col[i] = static_cast<long>(ncols++);
      ++n_art;
    }

  Tableau tab(m, ncols);
  for (std::size_t c = 0; c < ns; ++c) tab.ub_[c] = lp.upper[var_of[c]] - lp.lower[var_of[c]];
  for (std::size_t i = 0; i < m; ++i) {
    for (const auto& [j, a] : lp.rows[i].terms)
      if (col_of[j] >= 0) tab.at(i, static_cast<std::size_t>(col_of[j])) += sign[i] * a;
    if (slack_col[i] >= 0) tab.at(i, static_cast<std::size_t>(slack_col[i])) = sign[i] * slack_coef[i];
    if (art_col[i] >= 0) {
      tab.at(i, static_cast<std::size_t>(art_col[i])) = 1.0;
      tab.set_basic(i, static_cast<std::size_t>(art_col[i]), b[i]);
    } else {
      tab.set_basic(i, static_cast<std::size_t>(slack_col[i]), b[i]);
    }
  }

  if (n_art > 0) {
    std::vector<double> c1(ncols, 0.0);
    for (long c : art_col)
      if (c >= 0) c1[static_cast<std::size_t>(c)] = 1.0;
    const LPStatus s1 = tab.run(c1, opt, sol.iterations);
    if (s1 == LPStatus::iteration_limit) {
      sol.status = s1;
      return sol;
    }
    double infeas = 0.0;
    for (long c : art_col)
      if (c >= 0) infeas += tab.value(static_cast<std::size_t>(c));
    if (infeas > opt.feasibility_tol) {
      sol.status = LPStatus::infeasible;
      return sol;
    }
    for (long c : art_col)
      if (c >= 0) tab.ub_[static_cast<std::size_t>(c)] = 0.0;
  }

  std::vector<double> c2(ncols, 0.0);
  for (std::size_t c = 0; c < ns; ++c) c2[c] = lp.cost[var_of[c]];
  sol.status = tab.run(c2, opt, sol.iterations);
  if (sol.status != LPStatus::optimal) return sol;

  for (std::size_t j = 0; j < n0; ++j) {
    double v = lp.lower[j];
    if (col_of[j] >= 0) {
      const double range = lp.upper[j] - lp.lower[j];
      v += std::clamp(tab.value(static_cast<std::size_t>(col_of[j])), 0.0, range);
    }
    sol.x[j] = v;
    sol.objective += lp.cost[j] * v;
  }
  sol.max_residual = lp_residual(lp, sol.x);
  return sol;
}

double lp_residual(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    worst = std::max(worst, lp.lower[j] - x[j]);
    if (std::isfinite(lp.upper[j])) worst = std::max(worst, x[j] - lp.upper[j]);
  }
  for (const auto& row : lp.rows) {
    double s = 0.0;
    for (const auto& [j, a] : row.terms) s += a * x[j];
    const double r = s - row.rhs;
    switch (row.sense) {
      case RowSense::le: worst = std::max(worst, r); break;
      case RowSense::ge: worst = std::max(worst, -r); break;
      case RowSense::eq: worst = std::max(worst, std::abs(r)); break;
    }
  }
  return worst;
}

std::string to_lp_format(const LinearProgram& lp) {
  auto name = [&](std::size_t j) {
    return (j < lp.names.size() && !lp.names[j].empty()) ? lp.names[j] : "x" + std::to_string(j);
  };
  auto term = [&](std::ostringstream& os, double a, std::size_t j, bool first) {
    if (a < 0)
      os << (first ? "-" : " - ") << -a << " " << name(j);
    else
      os << (first ? "" : " + ") << a << " " << name(j);
  };
  std::ostringstream os;
  os.precision(17);
  os << "\\ supportgraph LP relaxation\nMinimize\n obj:";
  bool first = true;
  for (std::size_t j = 0; j < lp.cost.size(); ++j) {
    if (lp.cost[j] == 0.0) continue;
    os << ' ';
    term(os, lp.cost[j], j, first);
    first = false;
  }
  if (first) os << " 0 " << name(0);
  os << "\nSubject To\n";
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    const auto& row = lp.rows[i];
    os << ' ' << (row.name.empty() ? "c" + std::to_string(i) : row.name) << ":";
    bool f = true;
    for (const auto& [j, a] : row.terms) {
      os << ' ';
      term(os, a, j, f);
      f = false;
    }
    os << (row.sense == RowSense::le ? " <= " : row.sense == RowSense::ge ? " >= " : " = ") << row.rhs << "\n";
  }
  os << "Bounds\n";
  for (std::size_t j = 0; j < lp.cost.size(); ++j) {
    if (lp.lower[j] == lp.upper[j])
      os << ' ' << name(j) << " = " << lp.lower[j] << "\n";
    else if (std::isfinite(lp.upper[j]))
      os << ' ' << lp.lower[j] << " <= " << name(j) << " <= " << lp.upper[j] << "\n";
    else
      os << ' ' << name(j) << " >= " << lp.lower[j] << "\n";
  }
  os << "End\n";
  return os.str();
}

}  // namespace sg
