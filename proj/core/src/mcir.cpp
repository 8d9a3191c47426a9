#include "excir/mcir.hpp"

#include "excir/error.hpp"
#include "parallel.hpp"

namespace excir::mcir {

std::vector<std::size_t> pair_partners(const info::ColumnSet& features,
                                       const info::EstimatorOptions& options,
                                       unsigned threads) {
  const std::size_t k = features.size();
  if (k < 2) throw InputError("pairwise partners need at least two features");
  std::vector<std::vector<double>> mi(k, std::vector<double>(k, 0.0));
  detail::parallel_for(k, threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (j != i) mi[i][j] = info::mutual_information({features[i]}, {features[j]}, options);
    }
  });
  std::vector<std::size_t> partner(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t best = i == 0 ? 1 : 0;
    for (std::size_t j = 0; j < k; ++j) {
      if (j != i && mi[i][j] > mi[i][best]) best = j;
    }
    partner[i] = best;
  }
  return partner;
}

McirScore make_score(std::string feature, double cmmi_bits, double jmi_bits) {
  const double total = cmmi_bits + jmi_bits;
  if (!(total > 0.0)) {
    throw DegenerateInformationError(
        "MCIR undefined for '" + feature +
        "': conditional and joint mutual information are both zero");
  }
  McirScore s;
  s.feature = std::move(feature);
  s.cmmi_bits = cmmi_bits;
  s.jmi_bits = jmi_bits;
  s.mcir = cmmi_bits / total;
  s.joint_mutual_impact = jmi_bits / total;
  return s;
}

McirScore mcir_pair(const info::DiscretizedColumn& y,
                    const info::DiscretizedColumn& target,
                    const info::DiscretizedColumn& other,
                    const info::EstimatorOptions& options) {
  const double cmi =
      info::conditional_mutual_information(y, target, {&other}, options);
  const double jmi = info::joint_mutual_information(y, {&target, &other}, options);
  return make_score("", cmi, jmi);
}

McirScore mcir_full(const info::DiscretizedColumn& y, std::size_t target,
                    const info::ColumnSet& features,
                    const info::EstimatorOptions& options) {
  if (target >= features.size()) {
    throw InputError("target feature index out of range");
  }
  info::ColumnSet rest;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (i != target) rest.push_back(features[i]);
  }
  const double c = info::cmmi(y, *features[target], rest, options);
  const double j = info::joint_mutual_information(y, features, options);
  return make_score("", c, j);
}

bool DependentModel::mixes_weight_scales() const {
  bool has_mcir = false;
  bool has_pcir = false;
  for (const auto& t : terms) {
    (t.source == WeightSource::mcir ? has_mcir : has_pcir) = true;
  }
  return has_mcir && has_pcir;
}

double excir_dependent_predict(const DependentModel& model,
                               std::span<const double> row) {
  if (row.size() != model.terms.size()) {
    throw DimensionError("row length does not match the number of terms");
  }
  double num = 0.0;
  double den = 0.0;
  bool any_den = false;
  for (std::size_t i = 0; i < row.size(); ++i) {
    const auto& t = model.terms[i];
    if (t.direction == Direction::numerator) {
      num += t.weight * row[i];
    } else {
      den += t.weight * row[i];
      any_den = true;
    }
  }
  if (!any_den) throw InputError("dependent model has no denominator feature");
  if (den == 0.0) throw SingularRowError("denominator features sum to zero");
  return model.joint_mutual_impact.value_or(0.0) + num / den;
}

}  // namespace excir::mcir
