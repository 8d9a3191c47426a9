#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace excir {

enum class FeatureKind { discrete, continuous };

std::string_view to_string(FeatureKind kind);

// One named column of n finite values. Discrete columns hold integer codes.
// Immutable after construction; the constructor enforces the invariants.
class FeatureColumn {
 public:
  FeatureColumn(std::string name, FeatureKind kind, std::vector<double> values);

  const std::string& name() const noexcept { return name_; }
  FeatureKind kind() const noexcept { return kind_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  FeatureColumn subset(std::span<const std::size_t> rows) const;

 private:
  std::string name_;
  FeatureKind kind_;
  std::vector<double> values_;
};

// Model predictions (or observed targets), one per row. The kind decides how
// the column is discretized for the information estimators.
class OutputVector {
 public:
  explicit OutputVector(std::vector<double> values,
                        FeatureKind kind = FeatureKind::continuous);

  std::span<const double> values() const noexcept { return values_; }
  FeatureKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  OutputVector subset(std::span<const std::size_t> rows) const;

 private:
  std::vector<double> values_;
  FeatureKind kind_;
};

// A named column that is carried along but never attributed, e.g. a column of
// precomputed predictions.
struct AuxiliaryColumn {
  std::string name;
  std::vector<double> values;
};

// k feature columns of equal length n, an optional output, and any auxiliary
// columns loaded alongside.
class Dataset {
 public:
  Dataset(std::vector<FeatureColumn> features,
          std::optional<OutputVector> output = std::nullopt,
          std::vector<AuxiliaryColumn> auxiliary = {});

  std::size_t k() const noexcept { return features_.size(); }
  std::size_t n() const noexcept { return features_.front().size(); }

  const std::vector<FeatureColumn>& features() const noexcept {
    return features_;
  }
  const FeatureColumn& feature(std::size_t i) const { return features_.at(i); }
  std::optional<std::size_t> find_feature(std::string_view name) const;

  const std::optional<OutputVector>& output() const noexcept { return output_; }
  const std::vector<AuxiliaryColumn>& auxiliary() const noexcept {
    return auxiliary_;
  }
  const AuxiliaryColumn* find_auxiliary(std::string_view name) const;

  // Row j as k reals in feature order.
  std::vector<double> row(std::size_t j) const;

  Dataset subset(std::span<const std::size_t> rows) const;
  Dataset with_output(OutputVector output) const;

 private:
  std::vector<FeatureColumn> features_;
  std::optional<OutputVector> output_;
  std::vector<AuxiliaryColumn> auxiliary_;
};

// Auto-typing rule shared by the CSV loader and by materialized predictions:
// at most `max_categories` distinct integer values -> discrete.
FeatureKind infer_kind(std::span<const double> values,
                       std::size_t max_categories = 32);

}  // namespace excir
