#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "excir/types.hpp"

// Plug-in (maximum-likelihood) information estimators over discretized
// columns. Every quantity is in bits; 0 log 0 is taken as 0.
namespace excir::info {

enum class ColumnOrigin { native_discrete, binned_continuous };

struct DiscretizedColumn {
  std::vector<std::uint32_t> codes;  // each < categories
  std::size_t categories = 1;
  ColumnOrigin origin = ColumnOrigin::native_discrete;
  std::size_t bins = 0;  // equal-width bin count for binned columns

  std::size_t size() const noexcept { return codes.size(); }
};

// Discrete columns are re-coded to 0..C-1 in first-appearance order.
// Continuous columns go into `bins` equal-width bins over [min, max]; the
// maximum lands in the last bin. A constant column has one category.
DiscretizedColumn discretize(std::span<const double> values, FeatureKind kind,
                             std::size_t bins);
DiscretizedColumn discretize(const FeatureColumn& column, std::size_t bins);
DiscretizedColumn discretize(const OutputVector& output, std::size_t bins);

using ColumnSet = std::vector<const DiscretizedColumn*>;

struct EstimatorOptions {
  // Adds (m - 1) / (2 n ln 2) to every entropy, m = occupied cells.
  bool miller_madow = false;
  // Largest dense table (product of arities) the estimators will build.
  std::size_t table_budget = 10'000'000;
};

// Dense joint probability table; the last variable varies fastest.
class JointDistribution {
 public:
  JointDistribution(std::vector<std::size_t> arities,
                    std::vector<double> probabilities);

  const std::vector<std::size_t>& arities() const noexcept { return arities_; }
  std::span<const double> probabilities() const noexcept { return probs_; }
  std::size_t cells() const noexcept { return probs_.size(); }

  std::size_t index(std::span<const std::uint32_t> codes) const;
  double at(std::span<const std::uint32_t> codes) const {
    return probs_[index(codes)];
  }

 private:
  std::vector<std::size_t> arities_;
  std::vector<double> probs_;
};

JointDistribution joint_distribution(const ColumnSet& columns,
                                     const EstimatorOptions& options = {});

// H of the joint variable formed by `columns`; an empty set has entropy 0.
// The value depends only on the multiset of cell counts, so it is exactly
// invariant under reordering the columns.
double shannon_entropy(const ColumnSet& columns,
                       const EstimatorOptions& options = {});

// I(X;Y) = H(X) + H(Y) - H(X,Y), clamped to 0 within 1e-12 below zero.
double mutual_information(const ColumnSet& x, const ColumnSet& y,
                          const EstimatorOptions& options = {});

// I(Y;X|Z) = H(Y,Z) + H(X,Z) - H(Z) - H(Y,X,Z). Reduces to I(Y;X) for empty Z.
double conditional_mutual_information(const DiscretizedColumn& y,
                                      const DiscretizedColumn& x,
                                      const ColumnSet& z,
                                      const EstimatorOptions& options = {});

// Conditional multivariate mutual information: I(Y; target | others), with
// `others` all remaining features.
double cmmi(const DiscretizedColumn& y, const DiscretizedColumn& target,
            const ColumnSet& others, const EstimatorOptions& options = {});

// I(Y; (f_1, ..., f_k)) = H(Y) + H(F) - H(Y, F), always >= 0.
double joint_mutual_information(const DiscretizedColumn& y,
                                const ColumnSet& features,
                                const EstimatorOptions& options = {});

}  // namespace excir::info
