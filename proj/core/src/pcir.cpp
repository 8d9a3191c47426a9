#include "excir/pcir.hpp"

#include <algorithm>
#include <cmath>

#include "excir/error.hpp"

namespace excir::pcir {
namespace {

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sum_sq_about(std::span<const double> v, double c) {
  double s = 0.0;
  for (double x : v) s += (x - c) * (x - c);
  return s;
}

void check_pair(std::span<const double> f, std::span<const double> y) {
  if (f.size() != y.size()) {
    throw DimensionError("feature and output lengths differ");
  }
  if (f.empty()) throw InputError("empty input");
}

}  // namespace

std::string_view to_string(Direction d) {
  return d == Direction::numerator ? "numerator" : "denominator";
}

Means feature_means(std::span<const double> f, std::span<const double> y) {
  check_pair(f, y);
  const double fm = mean(f);
  const double ym = mean(y);
  return {fm, ym, (fm + ym) / 2.0};
}

double eta(std::span<const double> f, std::span<const double> y) {
  const auto m = feature_means(f, y);
  const double n = static_cast<double>(f.size());
  const double df = m.feature - m.joint;
  const double dy = m.output - m.joint;
  const double between = n * (df * df + dy * dy);
  const double total = sum_sq_about(f, m.joint) + sum_sq_about(y, m.joint);
  if (total == 0.0) {
    throw DegenerateInformationError(
        "PCIR undefined: feature and output are constant and equal");
  }
  // SSB <= SST holds exactly in real arithmetic; rounding can overshoot by an
  // ulp when the within-group spread is zero.
  return std::min(between / total, 1.0);
}

PcirScore pcir(const FeatureColumn& f, const OutputVector& y) {
  const auto dir = assign_direction(f.values(), y.values());
  return {f.name(), eta(f.values(), y.values()),
          feature_means(f.values(), y.values()), dir.direction};
}

DirectionResult assign_direction(std::span<const double> f,
                                 std::span<const double> y) {
  check_pair(f, y);
  const double fm = mean(f);
  const double ym = mean(y);
  double cov = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) cov += (f[i] - fm) * (y[i] - ym);
  if (cov == 0.0) return {Direction::numerator, true};
  return {cov > 0.0 ? Direction::numerator : Direction::denominator, false};
}

IndependentModelSpec::IndependentModelSpec(std::vector<double> etas,
                                           std::size_t numerator_count)
    : model_(std::move(etas), numerator_count) {
  for (double e : model_.weights()) {
    if (!(e >= 0.0 && e <= 1.0)) {
      throw InputError("eta weights must lie in [0, 1]");
    }
  }
}

double excir_independent_predict(const IndependentModelSpec& spec,
                                 std::span<const double> row) {
  return spec.model().predict(row);
}

std::vector<DerivativeCheck> derivative_check(const IndependentModelSpec& spec,
                                            std::span<const double> row,
                                            double h) {
  if (!(h > 0.0)) throw InputError("finite-difference step must be positive");
  const auto& model = spec.model();
  const auto [num, den] = model.parts(row);
  if (den == 0.0) throw SingularRowError("row has a zero denominator");

  std::vector<DerivativeCheck> out;
  out.reserve(row.size());
  std::vector<double> probe(row.begin(), row.end());
  for (std::size_t j = 0; j < row.size(); ++j) {
    const double w = spec.etas()[j];
    const double analytic = j < spec.numerator_count()
                                ? w / den
                                : -w * num / (den * den);
    probe[j] = row[j] + h;
    const double up = model.predict(probe);
    probe[j] = row[j] - h;
    const double down = model.predict(probe);
    probe[j] = row[j];
    const double fd = (up - down) / (2.0 * h);
    out.push_back({analytic, fd, w != 0.0 ? analytic / w : 0.0});
  }
  return out;
}

}  // namespace excir::pcir
