#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dimdist_oracle.hpp"
#include "excir/dimdist.hpp"
#include "excir/error.hpp"

namespace {

using namespace excir;
using namespace excir::dimdist;

Eigen::MatrixXd rows(std::initializer_list<std::initializer_list<double>> pts) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(pts.size()),
                    static_cast<Eigen::Index>(pts.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& p : pts) {
    Eigen::Index c = 0;
    for (double v : p) m(r, c++) = v;
    ++r;
  }
  return m;
}

HistogramGrid masses(std::vector<double> m) {
  HistogramGrid g(m.size(), {0.0}, {1.0});
  g.set_masses(std::move(m));
  return g;
}

DistanceConfig quick_config(std::size_t restarts = 16, std::size_t iters = 100) {
  DistanceConfig c;
  c.bins = 32;
  c.search = {restarts, iters, 7, 1};
  return c;
}

std::vector<double> gaussian(std::mt19937_64& gen, std::size_t n) {
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

TEST(Pushforward, Examples) {
  const EmpiricalMeasure m(rows({{1, 2}, {3, 4}}));
  const auto same = pushforward(OrthonormalMap::identity(2), m);
  EXPECT_EQ(same.points(), m.points());

  const OrthonormalMap rot(rows({{0, -1}, {1, 0}}), Eigen::Vector2d::Zero());
  const auto r = pushforward(rot, EmpiricalMeasure(rows({{1, 0}})));
  EXPECT_EQ(r.points()(0, 0), 0.0);
  EXPECT_EQ(r.points()(0, 1), 1.0);

  const OrthonormalMap coord(rows({{1, 0}}), Eigen::VectorXd::Zero(1));
  const auto c = pushforward(coord, EmpiricalMeasure(rows({{2, 5}, {3, 7}})));
  EXPECT_EQ(c.dim(), 1u);
  EXPECT_EQ(c.points()(0, 0), 2.0);
  EXPECT_EQ(c.points()(1, 0), 3.0);

  EXPECT_THROW(pushforward(coord, EmpiricalMeasure(rows({{1, 2, 3}}))), DimensionError);
}

TEST(OrthonormalMap, RejectsNonOrthonormalRows) {
  EXPECT_THROW(OrthonormalMap(rows({{1, 1}}), Eigen::VectorXd::Zero(1)), InputError);
  EXPECT_THROW(OrthonormalMap(rows({{1, 0}, {0, 1}, {0, 0}}), Eigen::VectorXd::Zero(3)),
               DimensionError);
}

TEST(Pushforward, IsAnIsometryAndKeepsMass) {
  std::mt19937_64 gen(4);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CounterRng rng(seed);
    const OrthonormalMap map(random_orthonormal_rows(3, 5, rng), Eigen::Vector3d(1, 2, 3));
    Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(10, 5);
    for (Eigen::Index r = 0; r < 10; ++r)
      for (Eigen::Index c = 0; c < 5; ++c) pts(r, c) = static_cast<double>(gen() % 1000) / 100.0;
    const EmpiricalMeasure m(pts);
    const auto out = pushforward(map, m);
    const Eigen::MatrixXd full = map.P().transpose() * map.P();
    double total = 0;
    for (double w : out.weights()) total += w;
    EXPECT_NEAR(total, 1.0, 1e-12);
    for (Eigen::Index a = 0; a < 10; ++a) {
      for (Eigen::Index b = 0; b < 10; ++b) {
        // The map is an isometry on the row space of P.
        const Eigen::VectorXd d = pts.row(a) - pts.row(b);
        EXPECT_NEAR((out.points().row(a) - out.points().row(b)).norm(), (full * d).norm(), 1e-10);
      }
    }
  }
}

TEST(Pushforward, SquareMapsPreserveDistances) {
  CounterRng rng(2);
  const OrthonormalMap map(random_orthonormal_rows(4, 4, rng), Eigen::Vector4d::Zero());
  std::mt19937_64 gen(1);
  Eigen::MatrixXd pts(6, 4);
  for (Eigen::Index r = 0; r < 6; ++r)
    for (Eigen::Index c = 0; c < 4; ++c) pts(r, c) = static_cast<double>(gen() % 100);
  const auto out = pushforward(map, EmpiricalMeasure(pts));
  for (Eigen::Index a = 0; a < 6; ++a)
    for (Eigen::Index b = 0; b < 6; ++b)
      EXPECT_NEAR((out.points().row(a) - out.points().row(b)).norm(),
                  (pts.row(a) - pts.row(b)).norm(), 1e-10);
}

TEST(Histogram, Examples) {
  const auto one = histogram(EmpiricalMeasure(rows({{0.3}})), 4);
  double max_mass = 0;
  for (double m : one.masses()) max_mass = std::max(max_mass, m);
  EXPECT_EQ(max_mass, 1.0);

  const auto two = histogram(EmpiricalMeasure(rows({{0.0}, {1.0}})), 4);
  EXPECT_EQ(two.masses()[0], 0.5);
  EXPECT_EQ(two.masses()[3], 0.5);

  std::mt19937_64 gen(10);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> v(1000);
  for (auto& x : v) x = u(gen);
  const auto h = histogram(EmpiricalMeasure::from_values(v), 4);
  for (double m : h.masses()) EXPECT_NEAR(m, 0.25, 0.05);
}

TEST(Histogram, SharedGridRejectsOutsidePoints) {
  const HistogramGrid grid(4, {0.0}, {1.0});
  EXPECT_THROW(histogram(EmpiricalMeasure(rows({{2.0}})), grid), InputError);
  EXPECT_THROW(HistogramGrid(0, {0.0}, {1.0}), InputError);
}

TEST(FDivergence, Examples) {
  EXPECT_EQ(f_divergence(masses({0.3, 0.7}), masses({0.3, 0.7}), Divergence::kl).bits, 0.0);
  EXPECT_EQ(f_divergence(masses({0.3, 0.7}), masses({0.3, 0.7}), Divergence::js).bits, 0.0);
  EXPECT_NEAR(f_divergence(masses({0.5, 0.5}), masses({0.25, 0.75}), Divergence::kl).bits,
              0.5 * std::log2(2.0) + 0.5 * std::log2(2.0 / 3.0), 1e-15);
  EXPECT_NEAR(0.5 * std::log2(2.0) + 0.5 * std::log2(2.0 / 3.0), 0.2075187496, 1e-9);
  EXPECT_EQ(f_divergence(masses({1, 0}), masses({0, 1}), Divergence::js).bits, 1.0);
}

TEST(FDivergence, InfiniteKlIsFlaggedAndSmoothingRemovesIt) {
  const auto v = f_divergence(masses({0.5, 0.5}), masses({1, 0}), Divergence::kl);
  EXPECT_TRUE(v.infinite);
  EXPECT_TRUE(std::isinf(v.score()));
  const auto s = f_divergence(masses({0.5, 0.5}), masses({1, 0}), Divergence::kl, 1e-6);
  EXPECT_FALSE(s.infinite);
  EXPECT_NEAR(s.bits, 0.5 * std::log2(0.5) + 0.5 * std::log2(0.5 / 1e-6), 1e-12);
}

TEST(FDivergence, JsSymmetricAndBounded) {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> a(6), b(6);
    double sa = 0, sb = 0;
    for (int i = 0; i < 6; ++i) {
      a[i] = (gen() % 3 == 0) ? 0.0 : u(gen);
      b[i] = (gen() % 3 == 0) ? 0.0 : u(gen);
      sa += a[i];
      sb += b[i];
    }
    if (sa == 0 || sb == 0) continue;
    for (auto& x : a) x /= sa;
    for (auto& x : b) x /= sb;
    double ta = 0, tb = 0;
    for (double x : a) ta += x;
    for (double x : b) tb += x;
    a[0] += 1.0 - ta;
    b[0] += 1.0 - tb;
    if (a[0] < 0 || b[0] < 0) continue;
    const auto p = masses(a), q = masses(b);
    const double pq = f_divergence(p, q, Divergence::js).bits;
    EXPECT_EQ(pq, f_divergence(q, p, Divergence::js).bits);
    EXPECT_GE(pq, 0.0);
    EXPECT_LE(pq, 1.0);
  }
}

TEST(ProjectionDistance, DiagonalCopyIsNearZero) {
  std::mt19937_64 gen(1);
  const auto t = gaussian(gen, 5000);
  Eigen::MatrixXd diag(5000, 2);
  for (int i = 0; i < 5000; ++i) {
    diag(i, 0) = t[i] / std::numbers::sqrt2 + 3.0;
    diag(i, 1) = t[i] / std::numbers::sqrt2 - 1.0;
  }
  const auto mu = EmpiricalMeasure::from_values(t);
  const auto r = projection_distance(mu, EmpiricalMeasure(diag), quick_config());
  EXPECT_LE(r.value.bits, 0.05);
  const auto e = embedding_distance(mu, EmpiricalMeasure(diag), quick_config());
  EXPECT_LE(e.value.bits, 0.05);
  EXPECT_LE(std::abs(r.value.bits - e.value.bits), 0.05);
}

TEST(ProjectionDistance, EqualMeasuresAreAtZero) {
  std::mt19937_64 gen(2);
  const auto v = gaussian(gen, 2000);
  const auto m = EmpiricalMeasure::from_values(v);
  EXPECT_EQ(projection_distance(m, m, quick_config()).value.bits, 0.0);
  EXPECT_EQ(embedding_distance(m, m, quick_config()).value.bits, 0.0);
  EXPECT_EQ(distance_hat(m, m, quick_config()).value.bits, 0.0);
}

TEST(ProjectionDistance, RejectsLargerFirstMeasure) {
  const EmpiricalMeasure two(rows({{1, 2}, {3, 4}}));
  const EmpiricalMeasure one(rows({{1}, {2}}));
  EXPECT_THROW(projection_distance(two, one, quick_config()), DimensionError);
  EXPECT_THROW(embedding_distance(two, one, quick_config()), DimensionError);
}

TEST(ProjectionDistance, MatchesAngleGrid) {
  std::mt19937_64 gen(3);
  std::vector<double> mu(2000);
  for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = (i % 2 == 0) ? -1.0 : 1.0;
  std::vector<std::array<double, 2>> delta(2000);
  Eigen::MatrixXd pts(2000, 2);
  const auto g = gaussian(gen, 4000);
  for (int i = 0; i < 2000; ++i) {
    delta[i] = {g[2 * i], g[2 * i + 1]};
    pts(i, 0) = g[2 * i];
    pts(i, 1) = g[2 * i + 1];
  }
  const double oracle = testkit::angle_grid_projection(mu, delta, 32);
  const auto r = projection_distance(EmpiricalMeasure::from_values(mu), EmpiricalMeasure(pts),
                                     quick_config(32, 100));
  EXPECT_GT(r.value.bits, 0.0);
  EXPECT_NEAR(r.value.bits, oracle, 0.02);
}

TEST(ProjectionDistance, InvariantUnderRotatingDelta) {
  std::mt19937_64 gen(6);
  const auto a = gaussian(gen, 3000);
  std::vector<double> mu(1500);
  for (int i = 0; i < 1500; ++i) mu[i] = a[i] * 0.5 + (i % 3 == 0 ? 2.0 : 0.0);
  Eigen::MatrixXd pts(1500, 2);
  for (int i = 0; i < 1500; ++i) {
    pts(i, 0) = a[1500 + i] * 2.0;
    pts(i, 1) = a[i];
  }
  const auto m = EmpiricalMeasure::from_values(mu);
  const auto base = projection_distance(m, EmpiricalMeasure(pts), quick_config(32, 150));
  CounterRng rng(11);
  const OrthonormalMap rot(random_orthonormal_rows(2, 2, rng), Eigen::Vector2d(5, -3));
  const auto moved =
      projection_distance(m, pushforward(rot, EmpiricalMeasure(pts)), quick_config(32, 150));
  EXPECT_NEAR(base.value.bits, moved.value.bits, 0.02);
}

TEST(DistanceHat, PreimageOfEveryRandomMapIsNearZero) {
  std::mt19937_64 gen(8);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    // delta lives on a line in R^3; mu is its image under a random map.
    const auto t = gaussian(gen, 3000);
    CounterRng rng(seed);
    const Eigen::MatrixXd dir = random_orthonormal_rows(1, 3, rng);
    Eigen::MatrixXd pts(3000, 3);
    for (int i = 0; i < 3000; ++i) pts.row(i) = t[i] * dir.row(0);
    const EmpiricalMeasure delta(pts);
    const OrthonormalMap map(dir, Eigen::VectorXd::Constant(1, 4.0));
    const auto mu = pushforward(map, delta);
    EXPECT_LE(distance_hat(mu, delta, quick_config()).value.bits, 0.05) << seed;
  }
}

TEST(DistanceHat, ThreadCountDoesNotChangeTheResult) {
  std::mt19937_64 gen(9);
  const auto a = gaussian(gen, 1000);
  const auto b = gaussian(gen, 2000);
  Eigen::MatrixXd pts(1000, 2);
  for (int i = 0; i < 1000; ++i) {
    pts(i, 0) = b[i];
    pts(i, 1) = b[1000 + i] * 0.3;
  }
  auto cfg = quick_config(12, 50);
  const auto one = distance_hat(EmpiricalMeasure::from_values(a), EmpiricalMeasure(pts), cfg);
  cfg.search.threads = 4;
  const auto four = distance_hat(EmpiricalMeasure::from_values(a), EmpiricalMeasure(pts), cfg);
  EXPECT_EQ(one.value.bits, four.value.bits);
  EXPECT_EQ(one.projection.map.P(), four.projection.map.P());
  EXPECT_EQ(one.embedding.map.P(), four.embedding.map.P());
}

TEST(Embed, MapsBackOntoMu) {
  CounterRng rng(4);
  const Eigen::MatrixXd P = random_orthonormal_rows(2, 4, rng);
  const Eigen::VectorXd b = Eigen::Vector2d(1, -2);
  const Eigen::VectorXd c = Eigen::Vector4d(0.5, 0.5, -1, 3);
  const EmpiricalMeasure mu(rows({{1, 2}, {3, 5}, {-1, 0}}));
  const auto alpha = embed(mu, P, b, c);
  const auto back = pushforward(OrthonormalMap(P, b), alpha);
  EXPECT_LE((back.points() - mu.points()).cwiseAbs().maxCoeff(), 1e-12);
}

}  // namespace
