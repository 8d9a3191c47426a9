#include "excir/types.hpp"

#include <cmath>
#include <unordered_set>

#include "excir/error.hpp"

namespace excir {
namespace {

bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v; }

void check_finite(std::string_view what, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw InputError(std::string(what) + ": non-finite value at row " +
                       std::to_string(i));
    }
  }
}

template <typename T>
std::vector<T> gather(std::span<const T> values,
                      std::span<const std::size_t> rows) {
  std::vector<T> out;
  out.reserve(rows.size());
  for (auto r : rows) {
    if (r >= values.size()) {
      throw DimensionError("row index " + std::to_string(r) +
                           " out of range for length " +
                           std::to_string(values.size()));
    }
    out.push_back(values[r]);
  }
  return out;
}

}  // namespace

std::string_view to_string(FeatureKind kind) {
  return kind == FeatureKind::discrete ? "discrete" : "continuous";
}

FeatureColumn::FeatureColumn(std::string name, FeatureKind kind,
                             std::vector<double> values)
    : name_(std::move(name)), kind_(kind), values_(std::move(values)) {
  if (values_.empty()) {
    throw InputError("feature '" + name_ + "' is empty");
  }
  check_finite("feature '" + name_ + "'", values_);
  if (kind_ == FeatureKind::discrete) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!is_integer(values_[i])) {
        throw InputError("discrete feature '" + name_ +
                         "' has non-integer value at row " + std::to_string(i));
      }
    }
  }
}

FeatureColumn FeatureColumn::subset(std::span<const std::size_t> rows) const {
  return FeatureColumn(name_, kind_, gather<double>(values_, rows));
}

OutputVector::OutputVector(std::vector<double> values, FeatureKind kind)
    : values_(std::move(values)), kind_(kind) {
  check_finite("output", values_);
  if (kind_ == FeatureKind::discrete) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!is_integer(values_[i])) {
        throw InputError("discrete output has non-integer value at row " +
                         std::to_string(i));
      }
    }
  }
}

OutputVector OutputVector::subset(std::span<const std::size_t> rows) const {
  return OutputVector(gather<double>(values_, rows), kind_);
}

Dataset::Dataset(std::vector<FeatureColumn> features,
                 std::optional<OutputVector> output,
                 std::vector<AuxiliaryColumn> auxiliary)
    : features_(std::move(features)),
      output_(std::move(output)),
      auxiliary_(std::move(auxiliary)) {
  if (features_.empty()) {
    throw InputError("dataset needs at least one feature column");
  }
  const std::size_t n = features_.front().size();
  std::unordered_set<std::string> names;
  for (const auto& f : features_) {
    if (f.size() != n) {
      throw DimensionError("feature '" + f.name() + "' has length " +
                           std::to_string(f.size()) + ", expected " +
                           std::to_string(n));
    }
    if (!names.insert(f.name()).second) {
      throw InputError("duplicate feature name '" + f.name() + "'");
    }
  }
  if (output_ && output_->size() != n) {
    throw DimensionError("output length " + std::to_string(output_->size()) +
                         " does not match n = " + std::to_string(n));
  }
  for (const auto& a : auxiliary_) {
    if (a.values.size() != n) {
      throw DimensionError("auxiliary column '" + a.name +
                           "' has the wrong length");
    }
  }
}

std::optional<std::size_t> Dataset::find_feature(std::string_view name) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name() == name) return i;
  }
  return std::nullopt;
}

const AuxiliaryColumn* Dataset::find_auxiliary(std::string_view name) const {
  for (const auto& a : auxiliary_) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

std::vector<double> Dataset::row(std::size_t j) const {
  std::vector<double> out;
  out.reserve(k());
  for (const auto& f : features_) out.push_back(f[j]);
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<FeatureColumn> cols;
  cols.reserve(k());
  for (const auto& f : features_) cols.push_back(f.subset(rows));
  std::optional<OutputVector> out;
  if (output_) out = output_->subset(rows);
  std::vector<AuxiliaryColumn> aux;
  for (const auto& a : auxiliary_) {
    aux.push_back({a.name, gather<double>(a.values, rows)});
  }
  return Dataset(std::move(cols), std::move(out), std::move(aux));
}

Dataset Dataset::with_output(OutputVector output) const {
  return Dataset(features_, std::move(output), auxiliary_);
}

FeatureKind infer_kind(std::span<const double> values,
                       std::size_t max_categories) {
  std::unordered_set<double> distinct;
  for (double v : values) {
    if (!is_integer(v)) return FeatureKind::continuous;
    distinct.insert(v);
    if (distinct.size() > max_categories) return FeatureKind::continuous;
  }
  return FeatureKind::discrete;
}

}  // namespace excir
