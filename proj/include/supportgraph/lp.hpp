#pragma once

// Dense bounded-variable two-phase primal simplex. Small problems only.

#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace sg {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { le, eq, ge };

struct LinearProgram {
  struct Row {
    std::vector<std::pair<std::size_t, double>> terms;
    RowSense sense = RowSense::eq;
    double rhs = 0.0;
    std::string name;
  };

  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::string> names;
  std::vector<Row> rows;

  std::size_t add_variable(double c, double lo = 0.0, double hi = kInf, std::string name = {});
  void add_row(std::vector<std::pair<std::size_t, double>> terms, RowSense sense, double rhs,
               std::string name = {});
  std::size_t num_variables() const { return cost.size(); }
};

enum class LPStatus { optimal, infeasible, unbounded, iteration_limit };

std::string_view to_string(LPStatus s);

struct LPOptions {
  /// Dantzig pricing until a run of degenerate pivots, then Bland's rule for
  /// the rest of the solve. `bland_only` uses Bland's rule throughout.
  bool bland_only = false;
  std::size_t degenerate_switch = 50;
  std::size_t max_iterations = 200000;
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
};

struct LPSolution {
  LPStatus status = LPStatus::infeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
  double max_residual = 0.0;
};

/// Lower bounds must be finite; upper bounds may be kInf.
LPSolution solve_lp(const LinearProgram& lp, const LPOptions& opt = {});

/// Largest violation of rows and bounds at x.
double lp_residual(const LinearProgram& lp, const std::vector<double>& x);

/// CPLEX LP text, for cross-checking with external solvers.
std::string to_lp_format(const LinearProgram& lp);

}  // namespace sg
