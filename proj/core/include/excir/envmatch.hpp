#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "excir/dimdist.hpp"
#include "excir/model.hpp"
#include "excir/types.hpp"

// Environment matching: choose a row subsample on which every feature sits at
// the same average squared distance from the output as on the full data, and
// whose output distribution stays close to the full one.
namespace excir::envmatch {

// sum_j (y - f_j)^2 over the k entries of one row.
double local_distance(double y, std::span<const double> row);

// (1/n) sum_j sum_i (y_i - f_ji)^2. Divides by the row count only, not n*k.
double final_distance(const OutputVector& output, const Dataset& dataset);

struct EnvGapResult {
  double d2_final = 0.0;
  double d2_prime_final = 0.0;
  double gap = 0.0;  // |d2_final - d2_prime_final|
  std::vector<std::size_t> selected_rows;  // sorted, distinct
};

// Gap between the full data and a sample given as its own columns.
// selected_rows is left empty since the rows are not known here.
EnvGapResult environment_gap(const Dataset& full, const OutputVector& y_full,
                             const Dataset& sample, const OutputVector& y_sample);

// Gap between the full data and the subset `rows` of it.
EnvGapResult environment_gap(const Dataset& full, const OutputVector& y_full,
                             std::span<const std::size_t> rows);

struct RiskSearchConfig {
  std::size_t n_prime = 1000;
  double lambda = 1.0;
  std::size_t candidates = 8;
  std::size_t refine_iters = 200;
  std::uint64_t seed = 0;
  dimdist::Divergence divergence = dimdist::Divergence::js;
  std::size_t bins = 32;
  double epsilon = 0.0;
  unsigned threads = 1;

  // Throws InputError unless 1 <= n_prime <= n, candidates >= 1, bins >= 1
  // and lambda, epsilon are finite and non-negative.
  void validate(std::size_t n) const;
};

// Subsets are enumerated exhaustively while C(n, n') stays within this budget.
inline constexpr std::uint64_t kExhaustiveBudget = 100'000;

// The size-n' subset with the smallest gap the search finds. Exhaustive (so
// globally optimal) within the budget; otherwise each of `candidates` seeded
// restarts builds a subset greedily and improves it by best single swaps, and
// the smallest gap wins, earliest restart on ties.
EnvGapResult select_lightweight_sample(const Dataset& dataset,
                                       const OutputVector& output,
                                       const RiskSearchConfig& cfg);

// Divergence of the sample's output distribution from the full one,
// D(y_sample || y_full), both histogrammed with cfg.bins bins on one grid
// covering both. Throws InputError when the support has zero width and
// cfg.bins > 1.
dimdist::DivergenceValue output_distribution_loss(const OutputVector& y_full,
                                                  const OutputVector& y_sample,
                                                  const RiskSearchConfig& cfg);

struct RiskResult {
  EnvGapResult sample;
  dimdist::DivergenceValue loss;
  double objective = 0.0;  // loss + lambda * gap (+inf for infinite loss)
  std::size_t candidates_evaluated = 0;
};

// argmin of loss + lambda * gap over the candidate subsets: every subset when
// enumeration fits the budget, otherwise the restart subsets of
// select_lightweight_sample plus one objective-refined copy of each.
RiskResult risk_minimize(const Dataset& dataset, const OutputVector& output,
                         const RiskSearchConfig& cfg);

// Same, with the outputs produced by evaluating `model` on every row.
RiskResult risk_minimize(const Dataset& dataset, const ModelHandle& model,
                         const RiskSearchConfig& cfg);

}  // namespace excir::envmatch
