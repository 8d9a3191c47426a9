#include "excir/dimdist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "excir/error.hpp"
#include "parallel.hpp"

namespace excir::dimdist {
namespace {

constexpr std::size_t kMaxGridCells = 10'000'000;

void check_weights(std::span<const double> w) {
  double total = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw InputError("measure weights must be finite and non-negative");
    }
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InputError("measure weights must sum to 1");
  }
}

double kl_term(double p, double q) { return p * std::log2(p / q); }

}  // namespace

// ---------------------------------------------------------------------------
// Measures and maps

EmpiricalMeasure::EmpiricalMeasure(Eigen::MatrixXd points,
                                   std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.rows() == 0 || points_.cols() == 0) {
    throw InputError("empirical measure needs at least one point and one dimension");
  }
  if (!points_.allFinite()) throw InputError("measure has non-finite coordinates");
  if (weights_.empty()) {
    weights_.assign(size(), 1.0 / static_cast<double>(size()));
  } else if (weights_.size() != size()) {
    throw DimensionError("weight count does not match point count");
  }
  check_weights(weights_);
}

EmpiricalMeasure EmpiricalMeasure::from_values(std::span<const double> values) {
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) {
    pts(static_cast<Eigen::Index>(i), 0) = values[i];
  }
  return EmpiricalMeasure(std::move(pts));
}

Eigen::VectorXd EmpiricalMeasure::mean() const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(points_.cols());
  for (Eigen::Index r = 0; r < points_.rows(); ++r) {
    m += weights_[static_cast<std::size_t>(r)] * points_.row(r).transpose();
  }
  return m;
}

OrthonormalMap::OrthonormalMap(Eigen::MatrixXd P, Eigen::VectorXd b)
    : P_(std::move(P)), b_(std::move(b)) {
  if (P_.rows() == 0 || P_.rows() > P_.cols()) {
    throw DimensionError("orthonormal map needs 1 <= d' <= d");
  }
  if (b_.size() != P_.rows()) throw DimensionError("offset has the wrong length");
  const Eigen::MatrixXd gram = P_ * P_.transpose();
  const double err =
      (gram - Eigen::MatrixXd::Identity(P_.rows(), P_.rows())).cwiseAbs().maxCoeff();
  if (err > 1e-10) {
    throw InputError("map rows are not orthonormal (max deviation " +
                     std::to_string(err) + ")");
  }
}

OrthonormalMap OrthonormalMap::identity(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return OrthonormalMap(Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n));
}

Eigen::MatrixXd random_orthonormal_rows(std::size_t out_dim, std::size_t in_dim,
                                        CounterRng& rng) {
  const auto d = static_cast<Eigen::Index>(in_dim);
  const auto dp = static_cast<Eigen::Index>(out_dim);
  Eigen::MatrixXd g(d, dp);
  for (Eigen::Index c = 0; c < dp; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) g(r, c) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, dp);
  // Sign convention from R's diagonal makes the draw Haar-distributed.
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (Eigen::Index c = 0; c < dp; ++c) {
    if (r(c, c) < 0.0) q.col(c) = -q.col(c);
  }
  return q.transpose();
}

EmpiricalMeasure pushforward(const OrthonormalMap& map, const EmpiricalMeasure& m) {
  if (map.in_dim() != m.dim()) {
    throw DimensionError("map expects dimension " + std::to_string(map.in_dim()) +
                         ", measure has " + std::to_string(m.dim()));
  }
  Eigen::MatrixXd out = m.points() * map.P().transpose();
  out.rowwise() += map.b().transpose();
  return EmpiricalMeasure(std::move(out),
                          std::vector<double>(m.weights().begin(), m.weights().end()));
}

EmpiricalMeasure embed(const EmpiricalMeasure& mu, const Eigen::MatrixXd& P,
                       const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  if (static_cast<std::size_t>(P.rows()) != mu.dim()) {
    throw DimensionError("embedding map does not match the measure dimension");
  }
  const auto d = P.cols();
  const Eigen::VectorXd shift =
      (Eigen::MatrixXd::Identity(d, d) - P.transpose() * P) * c;
  Eigen::MatrixXd centered = mu.points();
  centered.rowwise() -= b.transpose();
  Eigen::MatrixXd out = centered * P;
  out.rowwise() += shift.transpose();
  return EmpiricalMeasure(std::move(out),
                          std::vector<double>(mu.weights().begin(), mu.weights().end()));
}

// ---------------------------------------------------------------------------
// Histograms

HistogramGrid::HistogramGrid(std::size_t bins, std::vector<double> lo,
                             std::vector<double> hi)
    : bins_(bins), lo_(std::move(lo)), hi_(std::move(hi)) {
  if (bins_ == 0) throw InputError("histogram needs at least one bin");
  if (lo_.empty() || lo_.size() != hi_.size()) {
    throw DimensionError("histogram bounds are inconsistent");
  }
  std::size_t cells = 1;
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (!(hi_[i] > lo_[i])) throw InputError("histogram support has zero width");
    if (cells > kMaxGridCells / bins_) {
      throw InputError("histogram grid too large: bins^d exceeds " +
                       std::to_string(kMaxGridCells));
    }
    cells *= bins_;
  }
  masses_.assign(cells, 0.0);
}

HistogramGrid HistogramGrid::covering(
    std::span<const EmpiricalMeasure* const> measures, std::size_t bins,
    double pad_fraction) {
  if (measures.empty()) throw InputError("no measures to cover");
  const std::size_t d = measures.front()->dim();
  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  for (const auto* m : measures) {
    if (m->dim() != d) throw DimensionError("measures of different dimension");
    for (std::size_t j = 0; j < d; ++j) {
      const auto col = m->points().col(static_cast<Eigen::Index>(j));
      lo[j] = std::min(lo[j], col.minCoeff());
      hi[j] = std::max(hi[j], col.maxCoeff());
    }
  }
  // Square cells: every axis spans the widest range, centred on its own
  // midpoint. A measure lying flat along one axis would otherwise get an
  // arbitrarily fine grid there, and a slightly tilted copy of it would
  // scatter over all those cells.
  // Narrower axes also put their midpoint at a cell centre rather than on a
  // cell edge when the points still fit, so a flat measure sits inside one
  // row of cells instead of straddling two.
  double widest = 0.0;
  for (std::size_t j = 0; j < d; ++j) widest = std::max(widest, hi[j] - lo[j]);
  const double half = widest > 0.0 ? (0.5 + pad_fraction) * widest : 0.5;
  const double cell = 2.0 * half / static_cast<double>(bins);
  const double shift = bins % 2 == 0 ? 0.5 * cell : 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double range = hi[j] - lo[j];
    double mid = 0.5 * (lo[j] + hi[j]);
    if (range < widest && 0.5 * range <= half - shift) mid -= shift;
    lo[j] = mid - half;
    hi[j] = mid + half;
  }
  return HistogramGrid(bins, std::move(lo), std::move(hi));
}

bool HistogramGrid::same_layout(const HistogramGrid& other) const {
  return bins_ == other.bins_ && lo_ == other.lo_ && hi_ == other.hi_;
}

std::size_t HistogramGrid::cell_of(const double* point) const {
  std::size_t idx = 0;
  for (std::size_t j = 0; j < lo_.size(); ++j) {
    const double x = point[j];
    if (!(x >= lo_[j] && x <= hi_[j])) return npos;
    const double t = (x - lo_[j]) / (hi_[j] - lo_[j]) * static_cast<double>(bins_);
    const auto b = std::min(static_cast<std::size_t>(t), bins_ - 1);
    idx = idx * bins_ + b;
  }
  return idx;
}

void HistogramGrid::set_masses(std::vector<double> masses) {
  if (masses.size() != masses_.size()) {
    throw DimensionError("mass table has the wrong number of cells");
  }
  check_weights(masses);
  masses_ = std::move(masses);
}

HistogramGrid histogram(const EmpiricalMeasure& m, const HistogramGrid& grid) {
  if (m.dim() != grid.dim()) {
    throw DimensionError("measure and grid dimensions differ");
  }
  HistogramGrid out(grid.bins(), {grid.lo().begin(), grid.lo().end()},
                    {grid.hi().begin(), grid.hi().end()});
  std::vector<double> masses(out.cells(), 0.0);
  // Row-major copy so each point's coordinates are contiguous.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      pts = m.points();
  for (std::size_t r = 0; r < m.size(); ++r) {
    const auto cell = out.cell_of(pts.data() + r * m.dim());
    if (cell == HistogramGrid::npos) {
      throw InputError("point " + std::to_string(r) +
                       " lies outside the shared histogram support");
    }
    masses[cell] += m.weights()[r];
  }
  // Weights summed in a different order can drift by a few ulps.
  double total = 0.0;
  for (double v : masses) total += v;
  for (double& v : masses) v /= total;
  out.set_masses(std::move(masses));
  return out;
}

HistogramGrid histogram(const EmpiricalMeasure& m, std::size_t bins) {
  const EmpiricalMeasure* one[] = {&m};
  return histogram(m, HistogramGrid::covering(one, bins));
}

// ---------------------------------------------------------------------------
// Divergences

std::string_view to_string(Divergence kind) {
  return kind == Divergence::kl ? "kl" : "js";
}

Divergence parse_divergence(std::string_view text) {
  if (text == "kl") return Divergence::kl;
  if (text == "js") return Divergence::js;
  throw InputError("unknown divergence '" + std::string(text) + "' (kl or js)");
}

double DivergenceValue::score() const noexcept {
  return infinite ? std::numeric_limits<double>::infinity() : bits;
}

DivergenceValue f_divergence(const HistogramGrid& p, const HistogramGrid& q,
                             Divergence kind, double epsilon) {
  if (!p.same_layout(q)) {
    throw DimensionError("divergence needs histograms on the same grid");
  }
  if (!(epsilon >= 0.0)) throw InputError("epsilon must be non-negative");
  const auto pm = p.masses();
  const auto qm = q.masses();
  double total = 0.0;
  if (kind == Divergence::kl) {
    for (std::size_t i = 0; i < pm.size(); ++i) {
      if (pm[i] == 0.0) continue;
      double qi = qm[i];
      if (qi == 0.0) {
        if (epsilon == 0.0) {
          return {std::numeric_limits<double>::infinity(), true};
        }
        qi = epsilon;
      }
      total += kl_term(pm[i], qi);
    }
  } else {
    for (std::size_t i = 0; i < pm.size(); ++i) {
      const double a = pm[i];
      const double b = qm[i];
      if (a == 0.0 && b == 0.0) continue;
      const double mid = 0.5 * (a + b);
      double cell = 0.0;
      if (a > 0.0) cell += kl_term(a, mid);
      if (b > 0.0) cell += kl_term(b, mid);
      total += 0.5 * cell;
    }
    total = std::min(total, 1.0);
  }
  return {std::max(total, 0.0), false};
}

DivergenceValue shared_grid_divergence(const EmpiricalMeasure& p,
                                       const EmpiricalMeasure& q,
                                       Divergence kind, std::size_t bins,
                                       double epsilon) {
  const EmpiricalMeasure* both[] = {&p, &q};
  const auto grid = HistogramGrid::covering(both, bins);
  return f_divergence(histogram(p, grid), histogram(q, grid), kind, epsilon);
}

// ---------------------------------------------------------------------------
// Orthonormal search

namespace {

struct Candidate {
  DivergenceValue value;
  Eigen::MatrixXd P;
};

// Rotates columns (i, j) of P by theta, i.e. P <- P G(i, j, theta). Rows stay
// orthonormal.
void rotate_columns(Eigen::MatrixXd& P, Eigen::Index i, Eigen::Index j,
                    double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  for (Eigen::Index r = 0; r < P.rows(); ++r) {
    const double a = P(r, i);
    const double b = P(r, j);
    P(r, i) = c * a - s * b;
    P(r, j) = s * a + c * b;
  }
}

template <typename Objective>
Candidate run_restart(std::size_t out_dim, std::size_t in_dim,
                      const SearchConfig& cfg, std::size_t restart,
                      const Objective& objective) {
  CounterRng rng(cfg.seed, restart);
  Candidate best{{}, random_orthonormal_rows(out_dim, in_dim, rng)};
  best.value = objective(best.P);
  if (in_dim < 2) return best;
  constexpr double kSigmaStart = 0.5;
  constexpr double kSigmaEnd = 0.005;
  const double steps = static_cast<double>(std::max<std::size_t>(cfg.refine_iters, 1));
  Eigen::MatrixXd trial;
  for (std::size_t t = 0; t < cfg.refine_iters; ++t) {
    const double sigma =
        kSigmaStart * std::pow(kSigmaEnd / kSigmaStart, static_cast<double>(t) / steps);
    const auto i = static_cast<Eigen::Index>(rng.below(in_dim));
    auto j = static_cast<Eigen::Index>(rng.below(in_dim - 1));
    if (j >= i) ++j;
    trial = best.P;
    rotate_columns(trial, i, j, sigma * rng.normal());
    const auto value = objective(trial);
    // Ties are accepted so the walk can cross flat stretches of the
    // piecewise-constant histogram objective.
    if (value.score() <= best.value.score()) {
      best.value = value;
      best.P = trial;
    }
  }
  return best;
}

template <typename Objective>
Candidate search(std::size_t out_dim, std::size_t in_dim, const SearchConfig& cfg,
                 const Objective& objective) {
  const std::size_t restarts = std::max<std::size_t>(cfg.restarts, 1);
  std::vector<Candidate> results(restarts);
  detail::parallel_for(restarts, cfg.threads, [&](std::size_t r) {
    results[r] = run_restart(out_dim, in_dim, cfg, r, objective);
  });
  // Min-reduction in restart order keeps the result independent of threads.
  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts; ++r) {
    if (results[r].value.score() < results[best].value.score()) best = r;
  }
  return std::move(results[best]);
}

void check_dims(const EmpiricalMeasure& mu, const EmpiricalMeasure& delta) {
  if (mu.dim() > delta.dim()) {
    throw DimensionError("the first measure must not have the larger dimension (d' = " +
                         std::to_string(mu.dim()) + " > d = " +
                         std::to_string(delta.dim()) + ")");
  }
}

}  // namespace

DistanceResult projection_distance(const EmpiricalMeasure& mu,
                                   const EmpiricalMeasure& delta,
                                   const DistanceConfig& config) {
  check_dims(mu, delta);
  const Eigen::VectorXd mu_mean = mu.mean();
  const Eigen::VectorXd delta_mean = delta.mean();
  const std::vector<double> delta_weights(delta.weights().begin(),
                                          delta.weights().end());
  auto objective = [&](const Eigen::MatrixXd& P) {
    const Eigen::VectorXd b = mu_mean - P * delta_mean;
    Eigen::MatrixXd pts = delta.points() * P.transpose();
    pts.rowwise() += b.transpose();
    const EmpiricalMeasure pushed(std::move(pts), delta_weights);
    const EmpiricalMeasure* both[] = {&mu, &pushed};
    const auto grid = HistogramGrid::covering(both, config.bins);
    return f_divergence(histogram(mu, grid), histogram(pushed, grid), config.kind,
                        config.epsilon);
  };
  auto best = search(mu.dim(), delta.dim(), config.search, objective);
  Eigen::VectorXd b = mu_mean - best.P * delta_mean;
  return {best.value, OrthonormalMap(std::move(best.P), std::move(b))};
}

DistanceResult embedding_distance(const EmpiricalMeasure& mu,
                                  const EmpiricalMeasure& delta,
                                  const DistanceConfig& config) {
  check_dims(mu, delta);
  const Eigen::VectorXd mu_mean = mu.mean();
  const Eigen::VectorXd delta_mean = delta.mean();
  auto objective = [&](const Eigen::MatrixXd& P) {
    const Eigen::VectorXd b = mu_mean - P * delta_mean;
    const EmpiricalMeasure alpha = embed(mu, P, b, delta_mean);
    const EmpiricalMeasure* both[] = {&delta, &alpha};
    const auto grid = HistogramGrid::covering(both, config.bins);
    return f_divergence(histogram(delta, grid), histogram(alpha, grid), config.kind,
                        config.epsilon);
  };
  auto best = search(mu.dim(), delta.dim(), config.search, objective);
  Eigen::VectorXd b = mu_mean - best.P * delta_mean;
  return {best.value, OrthonormalMap(std::move(best.P), std::move(b))};
}

DistanceHat distance_hat(const EmpiricalMeasure& mu, const EmpiricalMeasure& delta,
                         const DistanceConfig& config) {
  auto proj = projection_distance(mu, delta, config);
  auto emb = embedding_distance(mu, delta, config);
  const double a = proj.value.score();
  const double b = emb.value.score();
  const double gap = (proj.value.infinite || emb.value.infinite)
                         ? (proj.value.infinite && emb.value.infinite
                                ? 0.0
                                : std::numeric_limits<double>::infinity())
                         : std::abs(a - b);
  const DivergenceValue value = a <= b ? proj.value : emb.value;
  return {value, std::move(proj), std::move(emb), gap};
}

}  // namespace excir::dimdist
