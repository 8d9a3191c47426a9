#pragma once

#include "excir/model.hpp"
#include "excir/report.hpp"
#include "excir/types.hpp"

namespace excir {

// Full attribution run: materialize predictions on every row, choose the
// lightweight sample by risk minimization, then score every feature on it.
//
// Per feature: entropy of the discretized column, eta and its direction, and
// in the dependent modes MCIR with its CMMI. In pairwise mode the partner of a
// feature is the other feature sharing the most information with it (lowest
// index on ties). Features whose scores are 0/0 are collected and reported
// together in one DegenerateInformationError.
ExplanationReport explain(const Dataset& dataset, const OutputVector& output,
                          const ExplainConfig& config);

ExplanationReport explain(const Dataset& dataset, const ModelHandle& model,
                          const ExplainConfig& config);

}  // namespace excir
