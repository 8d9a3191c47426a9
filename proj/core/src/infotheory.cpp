#include "excir/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "excir/error.hpp"

namespace excir::info {
namespace {

constexpr double kClamp = 1e-12;

double clamp_small_negative(double v) {
  return (v < 0.0 && v > -kClamp) ? 0.0 : v;
}

std::size_t check_columns(const ColumnSet& columns,
                          const EstimatorOptions& options) {
  std::size_t n = 0;
  std::size_t cells = 1;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const auto* c = columns[i];
    if (i == 0) {
      n = c->size();
    } else if (c->size() != n) {
      throw DimensionError("discretized columns have different lengths");
    }
    if (c->categories == 0) throw InputError("column with zero categories");
    if (cells > options.table_budget / c->categories) {
      throw InputError("joint table exceeds budget: arity product > " +
                       std::to_string(options.table_budget));
    }
    cells *= c->categories;
  }
  return cells;
}

std::vector<std::uint32_t> joint_counts(const ColumnSet& columns,
                                        std::size_t cells) {
  std::vector<std::uint32_t> counts(cells, 0);
  const std::size_t n = columns.front()->size();
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t idx = 0;
    for (const auto* c : columns) idx = idx * c->categories + c->codes[r];
    ++counts[idx];
  }
  return counts;
}

}  // namespace

DiscretizedColumn discretize(std::span<const double> values, FeatureKind kind,
                             std::size_t bins) {
  if (bins == 0) throw InputError("bin count must be at least 1");
  DiscretizedColumn out;
  out.codes.resize(values.size());
  if (kind == FeatureKind::discrete) {
    std::unordered_map<double, std::uint32_t> seen;
    for (std::size_t i = 0; i < values.size(); ++i) {
      auto [it, inserted] =
          seen.emplace(values[i], static_cast<std::uint32_t>(seen.size()));
      out.codes[i] = it->second;
    }
    out.categories = std::max<std::size_t>(seen.size(), 1);
    out.origin = ColumnOrigin::native_discrete;
    return out;
  }
  out.origin = ColumnOrigin::binned_continuous;
  out.bins = bins;
  if (values.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (lo == hi) {
    out.categories = 1;
    std::fill(out.codes.begin(), out.codes.end(), 0);
    return out;
  }
  out.categories = bins;
  const double width = hi - lo;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double t = (values[i] - lo) / width * static_cast<double>(bins);
    auto b = static_cast<std::size_t>(std::floor(t));
    out.codes[i] = static_cast<std::uint32_t>(std::min(b, bins - 1));
  }
  return out;
}

DiscretizedColumn discretize(const FeatureColumn& column, std::size_t bins) {
  return discretize(column.values(), column.kind(), bins);
}

DiscretizedColumn discretize(const OutputVector& output, std::size_t bins) {
  return discretize(output.values(), output.kind(), bins);
}

JointDistribution::JointDistribution(std::vector<std::size_t> arities,
                                     std::vector<double> probabilities)
    : arities_(std::move(arities)), probs_(std::move(probabilities)) {
  std::size_t cells = 1;
  for (auto a : arities_) cells *= a;
  if (cells != probs_.size()) {
    throw DimensionError("joint table size does not match the arity product");
  }
  double total = 0.0;
  for (double p : probs_) {
    if (p < 0.0) throw InputError("negative probability in joint table");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InputError("joint table does not sum to 1");
  }
}

std::size_t JointDistribution::index(std::span<const std::uint32_t> codes) const {
  if (codes.size() != arities_.size()) {
    throw DimensionError("code tuple has the wrong number of variables");
  }
  std::size_t idx = 0;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (codes[i] >= arities_[i]) throw DimensionError("code out of range");
    idx = idx * arities_[i] + codes[i];
  }
  return idx;
}

JointDistribution joint_distribution(const ColumnSet& columns,
                                     const EstimatorOptions& options) {
  if (columns.empty()) throw InputError("joint distribution of no columns");
  const std::size_t cells = check_columns(columns, options);
  const std::size_t n = columns.front()->size();
  if (n == 0) throw InputError("joint distribution of empty columns");
  const auto counts = joint_counts(columns, cells);
  std::vector<double> probs(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    probs[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
  }
  std::vector<std::size_t> arities;
  for (const auto* c : columns) arities.push_back(c->categories);
  return JointDistribution(std::move(arities), std::move(probs));
}

double shannon_entropy(const ColumnSet& columns,
                       const EstimatorOptions& options) {
  if (columns.empty()) return 0.0;
  const std::size_t cells = check_columns(columns, options);
  const std::size_t n = columns.front()->size();
  if (n == 0) return 0.0;
  auto counts = joint_counts(columns, cells);
  std::erase(counts, 0u);
  // Summing in ascending count order makes the result independent of how
  // the cells happen to be laid out.
  std::sort(counts.begin(), counts.end());
  const double total = static_cast<double>(n);
  double h = 0.0;
  for (auto c : counts) {
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  if (options.miller_madow) {
    h += static_cast<double>(counts.size() - 1) / (2.0 * total * std::numbers::ln2);
  }
  return h;
}

double mutual_information(const ColumnSet& x, const ColumnSet& y,
                          const EstimatorOptions& options) {
  ColumnSet xy = x;
  xy.insert(xy.end(), y.begin(), y.end());
  const double hx = shannon_entropy(x, options);
  const double hy = shannon_entropy(y, options);
  const double hxy = shannon_entropy(xy, options);
  return clamp_small_negative((hx + hy) - hxy);
}

double conditional_mutual_information(const DiscretizedColumn& y,
                                      const DiscretizedColumn& x,
                                      const ColumnSet& z,
                                      const EstimatorOptions& options) {
  ColumnSet yz{&y};
  yz.insert(yz.end(), z.begin(), z.end());
  ColumnSet xz{&x};
  xz.insert(xz.end(), z.begin(), z.end());
  ColumnSet yxz{&y, &x};
  yxz.insert(yxz.end(), z.begin(), z.end());
  const double h_yz = shannon_entropy(yz, options);
  const double h_xz = shannon_entropy(xz, options);
  const double h_z = shannon_entropy(z, options);
  const double h_yxz = shannon_entropy(yxz, options);
  return clamp_small_negative(((h_yz + h_xz) - h_z) - h_yxz);
}

double cmmi(const DiscretizedColumn& y, const DiscretizedColumn& target,
            const ColumnSet& others, const EstimatorOptions& options) {
  return conditional_mutual_information(y, target, others, options);
}

double joint_mutual_information(const DiscretizedColumn& y,
                                const ColumnSet& features,
                                const EstimatorOptions& options) {
  return mutual_information({&y}, features, options);
}

}  // namespace excir::info
