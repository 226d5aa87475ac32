#pragma once

// Over-complete integer program for joint support/class inference, solved by
// LP relaxation + best-bound branch-and-bound. exhaustive_minimize is the
// reference used in tests and by `sgraph infer --oracle`.

#include "supportgraph/energy.hpp"
#include "supportgraph/lp.hpp"

#include <vector>

namespace sg {

/// Variable layout. Supporter columns per object (0-based):
///   [0, N*)      supported from behind by column c (c == N is hidden)
///   [N*, 2N*)    supported from below by column c - N*
///   2N*          ground-self
/// with N* = N + 1.
struct IPModel {
  struct Chi {
    std::size_t i = 0;
    std::size_t column = 0;
    std::size_t lambda = 0;   // class of i
    std::size_t upsilon = 0;  // class of the supporter
    std::size_t var = 0;
  };

  std::size_t n = 0;
  std::size_t k = 0;
  LinearProgram lp;
  std::vector<std::size_t> b_sp;  // n x columns()
  std::vector<std::size_t> b_c;   // n x k
  std::vector<Chi> chi;
  /// Soft models only: number of saturated terms carried by each variable.
  std::vector<double> saturation;

  std::size_t columns() const { return 2 * (n + 1) + 1; }
  std::size_t ground_column() const { return 2 * (n + 1); }
  std::size_t hidden_column(SupportType t) const {
    return t == SupportType::behind ? n : (n + 1) + n;
  }
  std::size_t column(std::size_t supporter, SupportType t) const {
    return t == SupportType::behind ? supporter : (n + 1) + supporter;
  }
  std::size_t sp(std::size_t i, std::size_t col) const { return b_sp[i * columns() + col]; }
  std::size_t cls(std::size_t i, std::size_t lambda) const { return b_c[i * k + lambda]; }

  /// Supporter/type encoded by a column.
  ObjectAssignment decode_column(std::size_t col) const;
  /// Reads an integral LP point back into an assignment.
  Assignment decode(const std::vector<double>& x) const;
  /// 0/1 point encoding an admissible assignment.
  std::vector<double> encode(const Assignment& a) const;
};

/// Builds objective and constraints. Variables whose cost saturates (or that
/// would only ever pair with such variables) are fixed to 0. With `soft` they
/// stay free; their costs keep only the finite part and `saturation` counts
/// the saturated terms.
IPModel build_ip(const SupportProblem& problem, bool soft = false);

struct SolverOptions {
  LPOptions lp;
  std::size_t max_nodes = 200000;
  double prune_tol = 1e-9;
};

SupportSolution solve_support(const SupportProblem& problem, const SolverOptions& opt = {});

/// Global minimum over every admissible assignment. Throws SolverError when
/// n > max_n or the enumeration is too large.
SupportSolution exhaustive_minimize(const SupportProblem& problem, std::size_t max_n = 6);

/// All-hidden assignment used when nothing finite exists.
Assignment hidden_fallback(const SupportProblem& problem);

}  // namespace sg
