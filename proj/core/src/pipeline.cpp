#include "excir/pipeline.hpp"

#include <algorithm>
#include <mutex>
#include <string>

#include "excir/envmatch.hpp"
#include "excir/error.hpp"
#include "excir/infotheory.hpp"
#include "excir/mcir.hpp"
#include "excir/pcir.hpp"
#include "parallel.hpp"

namespace excir {
namespace {

constexpr std::size_t kDefaultSampleCap = 1000;

struct FeatureOutcome {
  FeatureReport report;
  std::optional<mcir::McirScore> score;
  std::string degenerate;  // reason, empty when the feature scored cleanly
};

}  // namespace

ExplanationReport explain(const Dataset& dataset, const OutputVector& output,
                          const ExplainConfig& config) {
  if (output.size() != dataset.n()) {
    throw DimensionError("output length does not match the dataset");
  }
  if (config.bins < 1) throw InputError("bins must be at least 1");
  const std::size_t n = dataset.n();
  const std::size_t k = dataset.k();

  envmatch::RiskSearchConfig search;
  search.n_prime = config.n_prime.value_or(std::min(n, kDefaultSampleCap));
  search.lambda = config.lambda;
  search.candidates = config.candidates;
  search.refine_iters = config.refine_iters;
  search.seed = config.seed;
  search.divergence = config.divergence;
  search.bins = config.bins;
  search.epsilon = config.epsilon;
  search.threads = config.threads;
  const auto risk = envmatch::risk_minimize(dataset, output, search);

  const auto& rows = risk.sample.selected_rows;
  const Dataset sample = dataset.subset(rows);
  const OutputVector y = output.subset(rows);

  info::EstimatorOptions est;
  est.miller_madow = config.miller_madow;
  const auto y_disc = info::discretize(y, config.bins);
  std::vector<info::DiscretizedColumn> cols(k);
  detail::parallel_for(k, config.threads, [&](std::size_t i) {
    cols[i] = info::discretize(sample.feature(i), config.bins);
  });
  info::ColumnSet all;
  for (const auto& c : cols) all.push_back(&c);

  const bool dependent = config.mode != DependenceMode::independent;
  const bool pairwise = config.mode == DependenceMode::pairwise && k > 1;

  std::vector<std::size_t> partner;
  if (pairwise) partner = mcir::pair_partners(all, est, config.threads);

  std::vector<FeatureOutcome> outcomes(k);
  detail::parallel_for(k, config.threads, [&](std::size_t i) {
    const auto& f = sample.feature(i);
    auto& out = outcomes[i];
    out.report.name = f.name();
    out.report.kind = f.kind();
    out.report.entropy_bits = info::shannon_entropy({&cols[i]}, est);
    out.report.direction = pcir::assign_direction(f.values(), y.values()).direction;
    try {
      out.report.pcir = pcir::eta(f.values(), y.values());
    } catch (const DegenerateInformationError&) {
      out.degenerate = "pcir";
    }
    if (!dependent) return;
    try {
      mcir::McirScore s;
      if (pairwise) {
        s = mcir::mcir_pair(y_disc, cols[i], cols[partner[i]], est);
      } else {
        s = mcir::mcir_full(y_disc, i, all, est);
      }
      s.feature = f.name();
      out.report.mcir = s.mcir;
      out.report.cmmi_bits = s.cmmi_bits;
      out.score = s;
    } catch (const DegenerateInformationError&) {
      out.degenerate += out.degenerate.empty() ? "mcir" : "+mcir";
    }
  });

  std::string bad;
  for (const auto& o : outcomes) {
    if (o.degenerate.empty()) continue;
    if (!bad.empty()) bad += ", ";
    bad += o.report.name + " (" + o.degenerate + ")";
  }
  if (!bad.empty()) {
    throw DegenerateInformationError("degenerate information (0/0) for features: " + bad);
  }

  ExplanationReport report;
  report.config = config;
  report.config.n_prime = search.n_prime;
  auto& g = report.globals;
  g.n = n;
  g.n_prime = search.n_prime;
  g.env_gap = risk.sample.gap;
  g.output_divergence_bits = risk.loss.score();
  g.seed = config.seed;
  if (dependent) {
    std::size_t top = 0;
    for (std::size_t i = 1; i < k; ++i) {
      if (outcomes[i].score->mcir > outcomes[top].score->mcir) top = i;
    }
    g.joint_mutual_impact = outcomes[top].score->joint_mutual_impact;
    g.jmi_bits = outcomes[top].score->jmi_bits;
  }
  for (auto& o : outcomes) report.features.push_back(std::move(o.report));
  return report;
}

ExplanationReport explain(const Dataset& dataset, const ModelHandle& model,
                          const ExplainConfig& config) {
  return explain(dataset, evaluate_model(model, dataset), config);
}

}  // namespace excir
