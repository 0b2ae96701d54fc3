#include <boltzmann/oracle.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

using namespace boltzmann;

namespace {

SpectralDensity random_density(int N, unsigned seed, double Tbar = 1.0)
{
  SpectralDensity f(N, Tbar, {0.0, 0.0, 0.0});
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (auto& c : f.c) c = 1.0 + 0.4 * dist(gen);
  return f;
}

double max_abs(const std::vector<double>& v)
{
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST(Oracle, Orders)
{
  const auto o = OracleOrders::exact_for(2);
  EXPECT_EQ(o.outer, 4);
  EXPECT_EQ(o.radial, 10);
  EXPECT_EQ(o.direction % 2, 0);
  EXPECT_EQ(o.scattering, 4);
  EXPECT_EQ(OracleOrders::exact_for(2, 3).outer, 7);
}

TEST(Oracle, RefusesLargeN) { EXPECT_THROW(build_oracle(5, CollisionKernel::maxwell(), 0, 1), std::invalid_argument); }

TEST(Oracle, ConservationAndMaxwellian)
{
  const int N = 2;
  const auto rule = gauss_hermite(N + 1);
  for (const auto& kernel : {CollisionKernel::maxwell(), CollisionKernel::hard_sphere()}) {
    const auto oracle = build_oracle(N, kernel, 0, 1);
    SpectralDensity m(N, 1.0, {0, 0, 0});
    std::fill(m.c.begin(), m.c.end(), 1.0);
    EXPECT_LT(max_abs(oracle.apply(m)), 1e-12) << kernel.tag();

    const auto f = random_density(N, 5);
    const auto q = oracle.apply(f);
    const double scale = max_abs(q);
    ASSERT_GT(scale, 1e-6);
    const int n = N + 1;
    double mass = 0, mx = 0, energy = 0;
    for (int c = 0; c < n; ++c)
      for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
          const double x = rule.nodes[a], y = rule.nodes[b], z = rule.nodes[c];
          const double v = q[a + n * (b + n * c)];
          mass += v;
          mx += x * v;
          energy += (x * x + y * y + z * z) * v;
        }
    EXPECT_NEAR(mass, 0.0, 1e-12 * scale);
    EXPECT_NEAR(mx, 0.0, 1e-12 * scale);
    EXPECT_NEAR(energy, 0.0, 1e-12 * scale);
  }
}

TEST(Oracle, StableUnderExtraPoints)
{
  const int N = 2;
  const auto kernel = CollisionKernel::hard_sphere();
  const auto a = build_oracle(N, kernel, 0, 1);
  const auto b = build_oracle(N, kernel, 2, 1);
  EXPECT_LT((a.tensor() - b.tensor()).cwiseAbs().maxCoeff(), 1e-11 * a.tensor().cwiseAbs().maxCoeff());
}

TEST(Oracle, SymmetricAndScaled)
{
  const int N = 1;
  const auto o = build_oracle(N, CollisionKernel::hard_sphere(), 0, 1);
  const int d = o.dof();
  for (int n = 0; n < d; ++n)
    for (int m = 0; m < d; ++m)
      for (int j = 0; j < d; ++j) EXPECT_EQ(o(n, m, j), o(m, n, j));
  auto f = random_density(N, 2, 1.0);
  const auto q1 = o.apply(f);
  f.Tbar = 2.0;
  const auto q2 = o.apply(f);
  for (int j = 0; j < d; ++j) EXPECT_NEAR(q2[j], std::pow(2.0, 3.5) * q1[j], 1e-13 * max_abs(q2));
}

TEST(Oracle, CacheRoundTrip)
{
  const auto o = build_oracle(1, CollisionKernel::maxwell(), 0, 1);
  const auto path = std::filesystem::temp_directory_path() / "boltzmann_oracle_test.bgor";
  o.save(path.string());
  const auto r = OracleTensor::load(path.string());
  EXPECT_EQ(r.N(), 1);
  EXPECT_EQ(r.beta(), 0.0);
  EXPECT_EQ((r.tensor() - o.tensor()).cwiseAbs().maxCoeff(), 0.0);
  std::filesystem::remove(path);
  EXPECT_THROW(OracleTensor::load(path.string()), io::IoError);
}
