#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "excir/types.hpp"

namespace excir {

// y = (sum_{i<m} w_i f_i) / (sum_{i>=m} w_i f_i): the first `numerator_count`
// features sit in the numerator, the rest in the denominator.
class RatioModel {
 public:
  RatioModel(std::vector<double> weights, std::size_t numerator_count);

  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t numerator_count() const noexcept { return m_; }
  std::size_t k() const noexcept { return weights_.size(); }

  struct Parts {
    double numerator;
    double denominator;
  };
  Parts parts(std::span<const double> row) const;

  // Throws SingularRowError when the denominator sum is zero.
  double predict(std::span<const double> row) const;

 private:
  std::vector<double> weights_;
  std::size_t m_;
};

struct SyntheticModel {
  RatioModel model;
};

// Predictions already present in the dataset as an auxiliary column.
struct PrecomputedModel {
  std::string column;
};

// A shell command that reads CSV rows (no header, features in dataset order)
// on stdin and writes one prediction per line on stdout.
struct ExternalModel {
  std::string command;
};

using ModelHandle = std::variant<SyntheticModel, PrecomputedModel, ExternalModel>;

// Parses "synthetic", "precomputed:<col>" or "exec:<cmd>". The synthetic
// variant needs weights, so it is built from `synthetic` when given.
ModelHandle parse_model_handle(const std::string& text,
                               const RatioModel* synthetic = nullptr);

// One prediction per requested row, in request order. Deterministic for the
// synthetic and precomputed variants. Throws EvaluationError carrying the
// offending row index when the contract is broken.
OutputVector evaluate_model(const ModelHandle& model, const Dataset& dataset,
                            std::span<const std::size_t> rows);

OutputVector evaluate_model(const ModelHandle& model, const Dataset& dataset);

}  // namespace excir
