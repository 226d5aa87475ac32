#include "supportgraph/scoring.hpp"

#include "supportgraph/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sg {

std::vector<double> softmax_predict(const LinearClassifier& clf, const std::vector<double>& features) {
  if (features.size() != clf.num_features())
    throw InputError("features", "expected " + std::to_string(clf.num_features()) + " features, got " +
                                     std::to_string(features.size()));
  if (static_cast<std::size_t>(clf.bias.size()) != clf.num_classes())
    throw InputError("classifier.bias", "expected one bias per class");
  const std::size_t k = clf.num_classes();
  std::vector<double> z(k);
  for (std::size_t c = 0; c < k; ++c) {
    double s = clf.bias[static_cast<Eigen::Index>(c)];
    for (std::size_t f = 0; f < features.size(); ++f)
      s += clf.weights(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(f)) * features[f];
    z[c] = s;
  }
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : z) v /= sum;
  return z;
}

namespace {

std::string pair_name(int i, int j) {
  return "(" + std::to_string(i) + ", " + (j == kHiddenId ? std::string("hidden") : std::to_string(j)) + ")";
}

template <class Lookup>
SupportTensor fill(const std::vector<int>& ids, Lookup&& lookup) {
  const std::size_t n = ids.size();
  SupportTensor t(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= n; ++j) {
      if (j == i) continue;
      t.at(i, j) = lookup(PairKey{ids[i], j == n ? kHiddenId : ids[j]});
    }
  return t;
}

SupportDistribution to_dist(const std::vector<double>& p) { return {p[0], p[1], p[2]}; }

}  // namespace

SupportTensor support_probabilities(const std::vector<int>& ids, const SupportInput& input) {
  if (const auto* pre = std::get_if<PrecomputedSupport>(&input)) {
    return fill(ids, [&](const PairKey& k) {
      const auto it = pre->table.find(k);
      if (it == pre->table.end())
        throw InputError("support.pairs", "missing pair " + pair_name(k.supported, k.supporter));
      return it->second;
    });
  }
  if (const auto* feat = std::get_if<SupportFeatureTable>(&input))
    return support_probabilities(ids, feat->table, feat->classifier);
  throw InputError("support", "no support probabilities or features available");
}

SupportTensor support_probabilities(const std::vector<int>& ids,
                                    const std::map<PairKey, std::vector<double>>& features,
                                    const LinearClassifier& clf) {
  if (clf.num_classes() != 3) throw ConfigError("support classifier must have 3 outputs");
  return fill(ids, [&](const PairKey& k) {
    const auto it = features.find(k);
    if (it == features.end())
      throw InputError("support.pairs", "missing features for pair " + pair_name(k.supported, k.supporter));
    return to_dist(softmax_predict(clf, it->second));
  });
}

ScenePosterior scene_posterior(const std::vector<double>& scores, const std::vector<std::string>& scenes) {
  if (scores.size() != scenes.size())
    throw InputError("scene_scores", "expected " + std::to_string(scenes.size()) + " scene scores, got " +
                                         std::to_string(scores.size()));
  ScenePosterior out;
  double sum = 0.0;
  for (double s : scores) sum += s;
  if (!(sum > 0.0)) throw InputError("scene_scores", "scores must not all be zero");
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out.probabilities.push_back(scores[i] / sum);
    if (scores[i] > scores[out.index]) out.index = i;
  }
  out.name = scenes[out.index];
  out.probability = out.probabilities[out.index];
  return out;
}

std::vector<double> class_probabilities(const Detection& det) {
  double sum = 0.0;
  for (double s : det.class_scores) sum += s;
  if (!(sum > 0.0))
    throw InputError("detections", "detection " + std::to_string(det.id) + " has all-zero class scores");
  std::vector<double> p;
  p.reserve(det.class_scores.size());
  for (double s : det.class_scores) p.push_back(s / sum);
  return p;
}

const std::array<ColorPrototype, 8>& color_palette() {
  static const std::array<ColorPrototype, 8> palette{{
      {"red", {255, 0, 0}},
      {"green", {0, 255, 0}},
      {"blue", {0, 0, 255}},
      {"yellow", {255, 255, 0}},
      {"brown", {139, 69, 19}},
      {"black", {0, 0, 0}},
      {"white", {255, 255, 255}},
      {"gray", {128, 128, 128}},
  }};
  return palette;
}

std::string color_attribute(const std::vector<std::size_t>& pixels, const std::vector<Rgb>& image) {
  if (pixels.empty()) throw InputError("regions", "colour of an empty region");
  double m[3] = {0, 0, 0};
  for (std::size_t p : pixels) {
    if (p >= image.size()) throw InputError("rgb", "pixel index out of range");
    for (int c = 0; c < 3; ++c) m[c] += image[p][c];
  }
  for (double& v : m) v /= static_cast<double>(pixels.size());
  std::string_view best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& proto : color_palette()) {
    double d = 0.0;
    for (int c = 0; c < 3; ++c) d += (m[c] - proto.rgb[c]) * (m[c] - proto.rgb[c]);
    if (d < best_d) {
      best_d = d;
      best = proto.name;
    }
  }
  return std::string(best);
}

}  // namespace sg
