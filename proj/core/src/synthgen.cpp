#include "excir/synthgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "excir/error.hpp"
#include "excir/report.hpp"
#include "excir/rng.hpp"

namespace excir::synth {
namespace {

constexpr int kMaxAttempts = 1000;

double draw(const Distribution& dist, CounterRng& rng) {
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Bernoulli>) {
          return rng.bernoulli(d.p) ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return rng.uniform(d.lo, d.hi);
        } else {
          return static_cast<double>(rng.below(d.categories));
        }
      },
      dist);
}

bool is_integer_valued(const Distribution& dist) {
  return !std::holds_alternative<Uniform>(dist);
}

std::vector<std::string> default_names(std::size_t k) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < k; ++i) names.push_back("f" + std::to_string(i + 1));
  return names;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (k < 2) throw InputError("synthetic spec needs at least two features");
  if (n < 1) throw InputError("synthetic spec needs at least one row");
  if (m < 1 || m >= k) throw InputError("numerator split m must satisfy 1 <= m < k");
  if (betas.size() != k || presence_p.size() != k || distributions.size() != k) {
    throw InputError("betas, presence_p and distributions need one entry per feature");
  }
  for (double b : betas) {
    if (!(b > 0.0) || !std::isfinite(b)) throw InputError("betas must be positive");
  }
  for (double p : presence_p) {
    if (!(p > 0.0 && p <= 1.0)) throw InputError("presence_p must lie in (0, 1]");
  }
  for (const auto& d : distributions) {
    if (const auto* b = std::get_if<Bernoulli>(&d); b && !(b->p >= 0.0 && b->p <= 1.0)) {
      throw InputError("Bernoulli p must lie in [0, 1]");
    }
    if (const auto* u = std::get_if<Uniform>(&d);
        u && !(u->lo < u->hi && std::isfinite(u->lo) && std::isfinite(u->hi))) {
      throw InputError("uniform bounds need lo < hi");
    }
    if (const auto* c = std::get_if<Categorical>(&d); c && c->categories < 1) {
      throw InputError("categorical needs at least one category");
    }
  }
  for (const auto& e : edges) {
    if (e.source >= k || e.target >= k || e.source == e.target) {
      throw InputError("dependency edge endpoints must be distinct features");
    }
    if (!(e.noise >= 0.0 && e.noise <= 1.0)) {
      throw InputError("dependency noise must lie in [0, 1]");
    }
  }
}

RatioModel GroundTruth::model() const {
  if (!has_ratio_model()) {
    throw InputError("ground truth for '" + preset + "' has no ratio model");
  }
  return RatioModel(betas, m);
}

SyntheticData generate(const SyntheticSpec& spec) {
  spec.validate();
  std::vector<std::vector<double>> cols(spec.k, std::vector<double>(spec.n));
  std::vector<double> y(spec.n);
  std::vector<double> row(spec.k);
  for (std::size_t j = 0; j < spec.n; ++j) {
    CounterRng rng(spec.seed, j);
    bool ok = false;
    for (int attempt = 0; attempt < kMaxAttempts && !ok; ++attempt) {
      for (std::size_t i = 0; i < spec.k; ++i) row[i] = draw(spec.distributions[i], rng);
      for (const auto& e : spec.edges) {
        // Both draws are always taken so the stream layout is fixed.
        const bool fresh = rng.bernoulli(e.noise);
        const double redraw = draw(spec.distributions[e.target], rng);
        row[e.target] = fresh ? redraw : row[e.source];
      }
      for (std::size_t i = 0; i < spec.k; ++i) {
        if (!rng.bernoulli(spec.presence_p[i])) row[i] = 0.0;
      }
      double num = 0.0;
      double den = 0.0;
      for (std::size_t i = 0; i < spec.k; ++i) {
        (i < spec.m ? num : den) += spec.betas[i] * row[i];
      }
      if (den != 0.0 && std::isfinite(num / den)) {
        ok = true;
        y[j] = num / den;
      }
    }
    if (!ok) {
      throw InputError("row " + std::to_string(j) + " still has a zero denominator after " +
                       std::to_string(kMaxAttempts) + " attempts");
    }
    for (std::size_t i = 0; i < spec.k; ++i) cols[i][j] = row[i];
  }

  GroundTruth truth;
  truth.seed = spec.seed;
  truth.feature_names = default_names(spec.k);
  truth.betas = spec.betas;
  truth.m = spec.m;
  truth.edges = spec.edges;

  std::vector<FeatureColumn> features;
  for (std::size_t i = 0; i < spec.k; ++i) {
    const auto kind = is_integer_valued(spec.distributions[i]) ? FeatureKind::discrete
                                                               : FeatureKind::continuous;
    features.emplace_back(truth.feature_names[i], kind, std::move(cols[i]));
  }
  return {Dataset(std::move(features), OutputVector(std::move(y))), std::move(truth)};
}

SyntheticData preset(std::string_view name, std::size_t n, std::uint64_t seed,
                     double noise) {
  if (name == "xor") {
    if (n == 0 || n % 4 != 0) {
      throw InputError("xor preset needs n to be a positive multiple of 4");
    }
    constexpr std::array<std::array<double, 3>, 4> table{
        {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}}};
    std::vector<double> f1(n), f2(n), y(n);
    for (std::size_t j = 0; j < n; ++j) {
      f1[j] = table[j % 4][0];
      f2[j] = table[j % 4][1];
      y[j] = table[j % 4][2];
    }
    std::vector<FeatureColumn> features;
    features.emplace_back("f1", FeatureKind::discrete, std::move(f1));
    features.emplace_back("f2", FeatureKind::discrete, std::move(f2));
    GroundTruth truth;
    truth.preset = "xor";
    truth.seed = seed;
    truth.feature_names = {"f1", "f2"};
    return {Dataset(std::move(features), OutputVector(std::move(y), FeatureKind::discrete)),
            std::move(truth)};
  }

  SyntheticSpec spec;
  spec.n = n;
  spec.seed = seed;
  if (name == "independent_k4") {
    spec.k = 4;
    spec.m = 2;
    spec.betas = {1.0, 2.0, 3.0, 4.0};
    CounterRng rng(seed, std::uint64_t{1} << 40);
    shuffle(std::span<double>(spec.betas), rng);
    // Redrawing rows with both denominator features masked couples those two
    // masks, so they are kept mostly present; the numerator masks are free.
    spec.presence_p = {0.8, 0.8, 0.95, 0.95};
    spec.distributions.assign(4, Uniform{0.5, 1.5});
  } else if (name == "chain_dependent_k3") {
    if (!(noise >= 0.0 && noise <= 1.0)) throw InputError("noise must lie in [0, 1]");
    spec.k = 3;
    spec.m = 1;
    spec.betas = {2.0, 1.0, 1.5};
    spec.presence_p.assign(3, 1.0);
    spec.distributions.assign(3, Categorical{4});
    spec.edges = {{0, 1, noise}, {1, 2, noise}};
  } else {
    throw InputError("unknown preset '" + std::string(name) +
                     "' (xor, independent_k4 or chain_dependent_k3)");
  }
  auto data = generate(spec);
  data.truth.preset = std::string(name);
  return data;
}

std::string truth_to_json(const GroundTruth& t) {
  JsonWriter w;
  w.begin_object();
  w.key("preset").value(t.preset);
  w.key("seed").value(t.seed);
  w.key("features").begin_array();
  for (const auto& f : t.feature_names) w.value(f);
  w.end_array();
  w.key("betas").begin_array();
  for (double b : t.betas) w.value(b);
  w.end_array();
  w.key("m").value(static_cast<std::uint64_t>(t.m));
  w.key("edges").begin_array();
  for (const auto& e : t.edges) {
    w.begin_object();
    w.key("source").value(static_cast<std::uint64_t>(e.source));
    w.key("target").value(static_cast<std::uint64_t>(e.target));
    w.key("noise").value(e.noise);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str();
}

}  // namespace excir::synth
