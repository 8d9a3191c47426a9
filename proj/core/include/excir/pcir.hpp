#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "excir/model.hpp"
#include "excir/types.hpp"

namespace excir::pcir {

// Which side of the ratio model a feature belongs to: numerator features move
// the output in the same direction, denominator features in the opposite one.
enum class Direction { numerator, denominator };

std::string_view to_string(Direction d);

struct Means {
  double feature;
  double output;
  double joint;  // (feature + output) / 2
};

Means feature_means(std::span<const double> f, std::span<const double> y);

struct PcirScore {
  std::string feature;
  double eta;
  Means means;
  Direction direction;
};

// Partial correlation impact ratio of a feature against the output:
//
//   eta = n [(f_mean - g)^2 + (y_mean - g)^2]
//         / [sum_j (f_j - g)^2 + sum_j (y_j - g)^2],   g = (f_mean + y_mean)/2
//
// i.e. the between-group over the total sum of squares of the two-group
// partition {feature values, output values}, hence in [0, 1]. Symmetric in its
// arguments. Throws DegenerateInformationError when the denominator is zero.
double eta(std::span<const double> f, std::span<const double> y);

PcirScore pcir(const FeatureColumn& f, const OutputVector& y);

struct DirectionResult {
  Direction direction;
  bool tie = false;  // zero covariance, numerator chosen by convention
};

// Numerator iff the sample covariance of (f, y) is >= 0.
DirectionResult assign_direction(std::span<const double> f,
                                 std::span<const double> y);

// Ratio model weighted by per-feature eta values in [0, 1].
class IndependentModelSpec {
 public:
  IndependentModelSpec(std::vector<double> etas, std::size_t numerator_count);

  const RatioModel& model() const noexcept { return model_; }
  std::span<const double> etas() const noexcept { return model_.weights(); }
  std::size_t numerator_count() const noexcept { return model_.numerator_count(); }

 private:
  RatioModel model_;
};

// Local output y = (sum_{i<m} eta_i f_i) / (sum_{i>=m} eta_i f_i).
double excir_independent_predict(const IndependentModelSpec& spec,
                                 std::span<const double> row);

struct DerivativeCheck {
  double analytic;     // eta_j / D (numerator) or -eta_j N / D^2 (denominator)
  double finite_diff;  // central difference with step h
  double ratio_to_eta; // analytic / eta_j; equals 1/D on the numerator side
};

// Partial derivatives of the eta-weighted ratio model at `row`, one feature at
// a time with the others held fixed. Throws SingularRowError if the row or a
// perturbed row has a zero denominator.
std::vector<DerivativeCheck> derivative_check(const IndependentModelSpec& spec,
                                            std::span<const double> row,
                                            double h);

}  // namespace excir::pcir
