#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "excir/rng.hpp"

// f-divergences between empirical measures, and the projection / embedding
// distances between measures living in spaces of different dimension.
namespace excir::dimdist {

// Weighted point cloud in R^d; one point per row of `points`.
class EmpiricalMeasure {
 public:
  explicit EmpiricalMeasure(Eigen::MatrixXd points,
                            std::vector<double> weights = {});

  // 1-D convenience constructor.
  static EmpiricalMeasure from_values(std::span<const double> values);

  const Eigen::MatrixXd& points() const noexcept { return points_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(points_.cols()); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(points_.rows()); }
  Eigen::VectorXd mean() const;

 private:
  Eigen::MatrixXd points_;
  std::vector<double> weights_;
};

// x -> P x + b with P (d' x d) having orthonormal rows.
class OrthonormalMap {
 public:
  OrthonormalMap(Eigen::MatrixXd P, Eigen::VectorXd b);

  static OrthonormalMap identity(std::size_t d);

  const Eigen::MatrixXd& P() const noexcept { return P_; }
  const Eigen::VectorXd& b() const noexcept { return b_; }
  std::size_t out_dim() const noexcept { return static_cast<std::size_t>(P_.rows()); }
  std::size_t in_dim() const noexcept { return static_cast<std::size_t>(P_.cols()); }

 private:
  Eigen::MatrixXd P_;
  Eigen::VectorXd b_;
};

// Orthonormal rows from the thin QR factor of a d x d' Gaussian matrix.
Eigen::MatrixXd random_orthonormal_rows(std::size_t out_dim, std::size_t in_dim,
                                        CounterRng& rng);

// Points mapped through x -> P x + b; weights preserved.
EmpiricalMeasure pushforward(const OrthonormalMap& map, const EmpiricalMeasure& m);

// Fixed-grid histogram: B bins per dimension over [lo_i, hi_i], cells in
// row-major order. Masses are non-negative and sum to 1.
class HistogramGrid {
 public:
  HistogramGrid(std::size_t bins, std::vector<double> lo, std::vector<double> hi);

  // Grid covering every point of every measure with square cells: each axis
  // spans the widest per-axis range plus `pad_fraction` of it on both sides
  // (+-0.5 when every range is zero). A narrower axis is shifted by half a
  // cell when that keeps its points covered, so its midpoint is a cell centre.
  static HistogramGrid covering(std::span<const EmpiricalMeasure* const> measures,
                                std::size_t bins, double pad_fraction = 0.01);

  std::size_t bins() const noexcept { return bins_; }
  std::size_t dim() const noexcept { return lo_.size(); }
  std::span<const double> lo() const noexcept { return lo_; }
  std::span<const double> hi() const noexcept { return hi_; }
  std::span<const double> masses() const noexcept { return masses_; }
  std::size_t cells() const noexcept { return masses_.size(); }

  bool same_layout(const HistogramGrid& other) const;

  // Cell index of a point, or npos when it is outside the support.
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t cell_of(const double* point) const;

  // Replaces the masses; they must be non-negative and sum to 1 within 1e-12.
  void set_masses(std::vector<double> masses);

 private:
  std::size_t bins_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<double> masses_;
};

// Histogram on the measure's own padded support.
HistogramGrid histogram(const EmpiricalMeasure& m, std::size_t bins);
// Histogram on the layout of `grid`; throws if a point falls outside it.
HistogramGrid histogram(const EmpiricalMeasure& m, const HistogramGrid& grid);

enum class Divergence { kl, js };

std::string_view to_string(Divergence kind);
Divergence parse_divergence(std::string_view text);

// Divergence in bits. `infinite` is set for KL with epsilon = 0 when p has
// mass where q has none; `bits` is then +infinity.
struct DivergenceValue {
  double bits = 0.0;
  bool infinite = false;

  // +infinity for infinite values, for ordering.
  double score() const noexcept;
};

// KL(p || q) = sum p log2(p / q); with epsilon > 0 every empty cell of q is
// raised to epsilon first. JS is the mean KL of p and q to their midpoint and
// is at most 1 bit. Both histograms must share a layout.
DivergenceValue f_divergence(const HistogramGrid& p, const HistogramGrid& q,
                             Divergence kind, double epsilon = 0.0);

struct SearchConfig {
  std::size_t restarts = 64;
  std::size_t refine_iters = 200;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct DistanceConfig {
  Divergence kind = Divergence::js;
  std::size_t bins = 32;
  double epsilon = 0.0;
  SearchConfig search;
};

// Divergence between two measures of the same dimension, histogrammed on a
// shared grid covering both, with no map applied.
DivergenceValue shared_grid_divergence(const EmpiricalMeasure& p,
                                       const EmpiricalMeasure& q,
                                       Divergence kind, std::size_t bins,
                                       double epsilon = 0.0);

struct DistanceResult {
  DivergenceValue value;
  OrthonormalMap map;
};

// Approximates inf over P in O(d', d) of D(mu || P delta + b), b aligning the
// means. Random orthonormal starts, each refined by Givens-rotation hill
// climbing. Requires mu.dim() <= delta.dim().
DistanceResult projection_distance(const EmpiricalMeasure& mu,
                                   const EmpiricalMeasure& delta,
                                   const DistanceConfig& config);

// Approximates inf over rigid embeddings alpha of mu into R^d (points
// P^T (x - b) shifted inside null(P) so the means agree, hence
// Phi_{P,b}(alpha) = mu) of D(delta || alpha). Same search as above.
DistanceResult embedding_distance(const EmpiricalMeasure& mu,
                                  const EmpiricalMeasure& delta,
                                  const DistanceConfig& config);

struct DistanceHat {
  DivergenceValue value;  // min of the two
  DistanceResult projection;
  DistanceResult embedding;
  double disagreement;  // |projection - embedding| in bits (inf if one is)
};

DistanceHat distance_hat(const EmpiricalMeasure& mu,
                         const EmpiricalMeasure& delta,
                         const DistanceConfig& config);

// Embedded points P^T (x - b) + (I - P^T P) c for each row x of mu.
EmpiricalMeasure embed(const EmpiricalMeasure& mu, const Eigen::MatrixXd& P,
                       const Eigen::VectorXd& b, const Eigen::VectorXd& c);

}  // namespace excir::dimdist
