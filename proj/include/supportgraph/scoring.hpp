#pragma once

// Classifier evaluation, support/scene probabilities and colour attributes.

#include "supportgraph/types.hpp"

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sg {

std::vector<double> softmax_predict(const LinearClassifier& clf, const std::vector<double>& features);

/// p[i][j] for object indices i, supporter column j; column N is the hidden
/// supporter. Diagonal entries are unused.
struct SupportTensor {
  std::size_t n = 0;
  std::vector<SupportDistribution> data;

  SupportTensor() = default;
  explicit SupportTensor(std::size_t objects)
      : n(objects), data(objects * (objects + 1), SupportDistribution{0.0, 0.0, 1.0}) {}

  SupportDistribution& at(std::size_t i, std::size_t j) { return data[i * (n + 1) + j]; }
  const SupportDistribution& at(std::size_t i, std::size_t j) const { return data[i * (n + 1) + j]; }
  std::size_t hidden() const { return n; }
};

/// From a precomputed table or from ingested feature vectors. `ids` maps object
/// index -> detection id. Throws InputError on a missing ordered pair.
SupportTensor support_probabilities(const std::vector<int>& ids, const SupportInput& input);

/// From feature vectors keyed by detection id (supporter kHiddenId = hidden).
SupportTensor support_probabilities(const std::vector<int>& ids,
                                    const std::map<PairKey, std::vector<double>>& features,
                                    const LinearClassifier& clf);

struct ScenePosterior {
  std::size_t index = 0;
  std::string name;
  double probability = 0.0;
  std::vector<double> probabilities;
};

/// Argmax of the (normalised) scene scores; ties go to the earlier scene type.
ScenePosterior scene_posterior(const std::vector<double>& scores, const std::vector<std::string>& scenes);

/// Detection class scores normalised to a distribution.
std::vector<double> class_probabilities(const Detection& det);

struct ColorPrototype {
  std::string_view name;
  Rgb rgb;
};

const std::array<ColorPrototype, 8>& color_palette();

/// Nearest prototype (Euclidean, RGB) to the mean colour of the region.
std::string color_attribute(const std::vector<std::size_t>& pixels, const std::vector<Rgb>& image);

}  // namespace sg
