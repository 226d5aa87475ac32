#include "supportgraph/energy.hpp"

#include "supportgraph/error.hpp"

#include <cmath>

namespace sg {

void EnergyWeights::validate() const {
  for (double w : {alpha_class, alpha_distance, alpha_support, k_hidden})
    if (!std::isfinite(w) || w < 0.0) throw ConfigError("energy weights must be finite and non-negative");
}

void SupportProblem::validate() const {
  auto bad = [](const std::string& what) { throw InputError("problem", what); };
  if (k <= kGroundClass) bad("vocabulary must contain the ground class");
  if (support.n != n) bad("support tensor size");
  if (static_cast<std::size_t>(class_prob.rows()) != n || static_cast<std::size_t>(class_prob.cols()) != k)
    bad("class probability matrix must be n x k");
  if (static_cast<std::size_t>(class_given_scene.size()) != k) bad("class prior must have k entries");
  if (static_cast<std::size_t>(support_prior.rows()) != k || static_cast<std::size_t>(support_prior.cols()) != k)
    bad("support prior must be k x k");
  if (bottom.size() != n || top.size() != n) bad("heights must have n entries");
  if (static_cast<std::size_t>(horizontal_distance.rows()) != n ||
      static_cast<std::size_t>(horizontal_distance.cols()) != n)
    bad("horizontal distances must be n x n");
  weights.validate();
}

double neg_log(double x) {
  if (!(x > 0.0)) return kSaturated;
  return std::min(-std::log(x), kSaturated);
}

namespace {

std::size_t label(SupportType t) {
  return static_cast<std::size_t>(t == SupportType::below ? SupportLabel::below : SupportLabel::behind);
}

double weighted(double alpha, double term) { return term >= kSaturated ? kSaturated : alpha * term; }

}  // namespace

bool strictly_lowest(const SupportProblem& p, std::size_t i) {
  for (std::size_t j = 0; j < p.n; ++j)
    if (j != i && !(p.bottom[j] > p.bottom[i])) return false;
  return true;
}

double e_support(const SupportProblem& p, std::size_t i, const ObjectAssignment& a) {
  if (a.class_index == kGroundClass) return 0.0;
  switch (a.supporter.kind) {
    case SupporterRef::Kind::ground_self: return 0.0;
    case SupporterRef::Kind::hidden: return neg_log(p.support.at(i, p.n)[label(a.type)]);
    case SupporterRef::Kind::object:
      if (a.supporter.object == i || a.supporter.object >= p.n) return kSaturated;
      return neg_log(p.support.at(i, a.supporter.object)[label(a.type)]);
  }
  return kSaturated;
}

double e_class(const SupportProblem& p, std::size_t i, std::size_t cls) {
  const auto r = static_cast<Eigen::Index>(i);
  const auto c = static_cast<Eigen::Index>(cls);
  return neg_log(p.class_prob(r, c) * p.class_given_scene(c) * p.scene_probability);
}

double c_class(const SupportProblem& p, std::size_t i, const Assignment& a) {
  const auto& ai = a[i];
  if (ai.class_index == kGroundClass)
    return strictly_lowest(p, i) ? neg_log(p.class_prob(static_cast<Eigen::Index>(i), kGroundClass)) : kSaturated;
  if (!ai.supporter.is_object()) return 0.0;
  const std::size_t s = ai.supporter.object;
  if (s == i || s >= p.n) return kSaturated;
  if (p.bottom[s] > p.top[i]) return kSaturated;
  return neg_log(p.support_prior(static_cast<Eigen::Index>(a[s].class_index),
                                 static_cast<Eigen::Index>(ai.class_index)));
}

double c_dist(const SupportProblem& p, std::size_t i, const ObjectAssignment& a) {
  if (!a.supporter.is_object()) return 0.0;
  const std::size_t s = a.supporter.object;
  if (s == i || s >= p.n) return kSaturated;
  if (a.type == SupportType::below) {
    const double gap = p.bottom[i] - p.top[s];
    return gap * gap;
  }
  return p.horizontal_distance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s));
}

double c_support(const SupportProblem& p, std::size_t i, const ObjectAssignment& a) {
  const bool ground = a.class_index == kGroundClass;
  if (a.supporter.is_ground_self() && !ground) return kSaturated;
  if (ground) {
    for (std::size_t j = 0; j < p.n; ++j)
      if (j != i && p.bottom[j] < p.bottom[i]) return kSaturated;
    // the ground supports itself; any other supporter breaks the coupling
    return a.supporter.is_ground_self() ? 0.0 : kSaturated;
  }
  if (a.supporter.is_hidden()) return p.weights.k_hidden;
  return 0.0;
}

EnergyBreakdown total_energy(const SupportProblem& p, const Assignment& a) {
  if (a.size() != p.n) throw InputError("assignment", "expected one entry per object");
  EnergyBreakdown e;
  auto count = [&](double t) { e.saturated_terms += t >= kSaturated; };
  for (std::size_t i = 0; i < p.n; ++i) {
    const double sp = e_support(p, i, a[i]);
    const double cl = e_class(p, i, a[i].class_index);
    const double cc = c_class(p, i, a);
    const double cd = c_dist(p, i, a[i]);
    const double cs = c_support(p, i, a[i]);
    for (double t : {sp, cl, cc, cd, cs}) count(t);
    e.support += sp;
    e.classification += cl;
    e.class_constraint += weighted(p.weights.alpha_class, cc);
    e.distance += weighted(p.weights.alpha_distance, cd);
    e.support_constraint += weighted(p.weights.alpha_support, cs);
  }
  e.total = e.support + e.classification + e.class_constraint + e.distance + e.support_constraint;
  return e;
}

bool admissible(const SupportProblem& p, std::size_t i, const ObjectAssignment& a) {
  if (a.class_index >= p.k) return false;
  if (a.supporter.is_object() && (a.supporter.object == i || a.supporter.object >= p.n)) return false;
  return a.supporter.is_ground_self() == (a.class_index == kGroundClass);
}

}  // namespace sg
