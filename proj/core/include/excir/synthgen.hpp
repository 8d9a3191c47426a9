#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "excir/model.hpp"
#include "excir/types.hpp"

// Seeded synthetic datasets with known generative structure.
namespace excir::synth {

struct Bernoulli {
  double p = 0.5;
};
struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};
// Integer codes 0..categories-1, uniformly.
struct Categorical {
  std::size_t categories = 2;
};

using Distribution = std::variant<Bernoulli, Uniform, Categorical>;

// Target copies source with probability 1 - noise and is drawn afresh from
// its own distribution otherwise. Edges apply in list order.
struct DependencyEdge {
  std::size_t source;
  std::size_t target;
  double noise;
};

// Rows follow y = (sum_{i<m} b_i x_i) / (sum_{i>=m} b_i x_i) where
// x_i = mask_i * f_i and mask_i ~ Bernoulli(presence_p_i).
struct SyntheticSpec {
  std::size_t k = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> betas;
  std::vector<double> presence_p;
  std::vector<Distribution> distributions;
  std::vector<DependencyEdge> edges;
  std::uint64_t seed = 0;

  void validate() const;
};

struct GroundTruth {
  std::string preset;  // empty for hand-built specs
  std::uint64_t seed = 0;
  std::vector<std::string> feature_names;
  std::vector<double> betas;  // empty when the output is not a ratio model
  std::size_t m = 0;
  std::vector<DependencyEdge> edges;

  bool has_ratio_model() const noexcept { return !betas.empty(); }
  RatioModel model() const;
};

struct SyntheticData {
  Dataset dataset;
  GroundTruth truth;
};

// Row j draws from stream (seed, j), so rows are reproducible one at a time.
// A row whose denominator sums to zero is redrawn, up to 1000 attempts.
SyntheticData generate(const SyntheticSpec& spec);

// Fixtures:
//   xor                 f1, f2 and y = f1 xor f2; the 4-row truth table
//                       repeated n/4 times (n must be a multiple of 4)
//   independent_k4      four presence-masked uniform features, m = 2, betas a
//                       seed-dependent permutation of {1, 2, 3, 4}
//   chain_dependent_k3  f1 categorical, f2 a noisy copy of f1, f3 a noisy
//                       copy of f2, m = 1
SyntheticData preset(std::string_view name, std::size_t n, std::uint64_t seed,
                     double noise = 0.1);

inline constexpr std::string_view kPresetNames[] = {"xor", "independent_k4",
                                                    "chain_dependent_k3"};

// JSON record of the ground truth, keys in a fixed order.
std::string truth_to_json(const GroundTruth& truth);

}  // namespace excir::synth
