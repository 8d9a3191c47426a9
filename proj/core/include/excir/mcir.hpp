#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "excir/infotheory.hpp"
#include "excir/pcir.hpp"

namespace excir::mcir {

using pcir::Direction;

// MCIR of one feature together with its complement, the joint mutual impact:
//   mcir = CMMI / (CMMI + JMI),  joint_mutual_impact = JMI / (CMMI + JMI).
struct McirScore {
  std::string feature;
  double cmmi_bits = 0.0;
  double jmi_bits = 0.0;
  double mcir = 0.0;
  double joint_mutual_impact = 0.0;
};

// Two-feature form: CMMI = I(Y; target | other), JMI = I(Y; (target, other)).
// Throws DegenerateInformationError when both terms are zero.
McirScore mcir_pair(const info::DiscretizedColumn& y,
                    const info::DiscretizedColumn& target,
                    const info::DiscretizedColumn& other,
                    const info::EstimatorOptions& options = {});

// All-features form: CMMI = I(Y; f_i | every other feature), JMI = I(Y; F).
McirScore mcir_full(const info::DiscretizedColumn& y, std::size_t target,
                    const info::ColumnSet& features,
                    const info::EstimatorOptions& options = {});

// Pairwise partner of every feature: the other feature j maximizing
// I(f_i; f_j), lowest index on ties. Needs at least two features.
std::vector<std::size_t> pair_partners(const info::ColumnSet& features,
                                       const info::EstimatorOptions& options = {},
                                       unsigned threads = 1);

// Builds a score from the two information terms.
McirScore make_score(std::string feature, double cmmi_bits, double jmi_bits);

enum class WeightSource { mcir, pcir };

struct WeightedTerm {
  double weight;
  Direction direction;
  WeightSource source = WeightSource::mcir;
};

// E(Y') = J + (sum_num w_i f_i) / (sum_den w_i f_i). Dependent features carry
// MCIR weights and independent ones their eta; J is omitted (0) for the mixed
// two-dependent-feature form.
struct DependentModel {
  std::vector<WeightedTerm> terms;
  std::optional<double> joint_mutual_impact;

  // True when MCIR and eta weights are mixed in one ratio.
  bool mixes_weight_scales() const;
};

// Throws SingularRowError when the denominator sum is zero and InputError when
// no term sits in the denominator.
double excir_dependent_predict(const DependentModel& model,
                               std::span<const double> row);

}  // namespace excir::mcir
