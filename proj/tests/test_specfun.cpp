#include <boltzmann/specfun.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace boltzmann;

namespace {

const double pi = std::numbers::pi;

double hermite_moment(int k)
{
  // int e^{-v^2} v^k dv
  if (k % 2) return 0.0;
  return std::tgamma((k + 1) / 2.0);
}

}  // namespace

TEST(GaussHermite, OnePoint)
{
  const auto r = gauss_hermite(1);
  ASSERT_EQ(r.order(), 1);
  EXPECT_NEAR(r.nodes[0], 0.0, 1e-15);
  EXPECT_NEAR(r.weights[0], std::sqrt(pi), 1e-14);
}

TEST(GaussHermite, TwoPoints)
{
  const auto r = gauss_hermite(2);
  EXPECT_NEAR(r.nodes[0], -0.7071068, 1e-7);
  EXPECT_NEAR(r.nodes[1], 0.7071068, 1e-7);
  EXPECT_NEAR(r.weights[0], 0.8862269, 1e-7);
  EXPECT_NEAR(r.weights[1], 0.8862269, 1e-7);
  EXPECT_NEAR(r.integrate([](double v) { return v * v; }), std::sqrt(pi) / 2, 1e-14);
}

TEST(GaussHermite, FivePointsEighthMoment)
{
  const auto r = gauss_hermite(5);
  EXPECT_NEAR(r.integrate([](double v) { return std::pow(v, 8); }), 11.6317284, 1e-6);
  EXPECT_NEAR(r.integrate([](double v) { return std::pow(v, 8); }), std::tgamma(4.5), 1e-12);
}

TEST(GaussHermite, ExactnessAndStructure)
{
  for (int n : {1, 2, 3, 5, 8, 17, 33, 65}) {
    const auto r = gauss_hermite(n);
    double total = 0;
    for (int i = 0; i < n; ++i) {
      EXPECT_GT(r.weights[i], 0.0);
      if (i > 0) EXPECT_LT(r.nodes[i - 1], r.nodes[i]);
      EXPECT_NEAR(r.nodes[i], -r.nodes[n - 1 - i], 1e-14 * std::max(1.0, std::abs(r.nodes[i])));
      EXPECT_NEAR(r.weights[i], r.weights[n - 1 - i], 1e-14 * r.weights[i]);
      total += r.weights[i];
    }
    EXPECT_NEAR(total, std::sqrt(pi), 1e-13 * std::sqrt(pi));
    for (int k = 0; k <= std::min(2 * n - 1, 40); ++k) {
      // odd moments cancel between terms of size int e^{-v^2}|v|^k
      const double scale = hermite_moment(k + k % 2);
      EXPECT_NEAR(r.integrate([k](double v) { return std::pow(v, k); }), hermite_moment(k), 1e-12 * scale)
          << "n=" << n << " k=" << k;
    }
  }
}

TEST(GaussHermite, InvalidOrder)
{
  EXPECT_THROW(gauss_hermite(0), std::invalid_argument);
  EXPECT_THROW(gauss_legendre(0), std::invalid_argument);
  EXPECT_THROW(gauss_laguerre(0, 0.0), std::invalid_argument);
}

TEST(GaussLaguerre, SmallRules)
{
  auto r = gauss_laguerre(1, 0.0);
  EXPECT_NEAR(r.nodes[0], 1.0, 1e-14);
  EXPECT_NEAR(r.weights[0], 1.0, 1e-14);
  r = gauss_laguerre(1, 0.5);
  EXPECT_NEAR(r.nodes[0], 1.5, 1e-14);
  EXPECT_NEAR(r.weights[0], 0.8862269, 1e-7);
  // int e^{-x} x^{2.5} x^3 = Gamma(6.5) = 287.885; 1871.2543 = Gamma(7.5) is the x^4 moment
  r = gauss_laguerre(3, 2.5);
  EXPECT_NEAR(r.integrate([](double x) { return x * x * x; }), 287.8852778, 1e-6);
  EXPECT_NEAR(r.integrate([](double x) { return x * x * x; }), std::tgamma(6.5), 1e-12 * std::tgamma(6.5));
  EXPECT_NEAR(r.integrate([](double x) { return x * x * x * x; }), 1871.2543, 1e-4);
}

TEST(GaussLaguerre, ExactnessAndStructure)
{
  for (double alpha : {0.0, 0.5, 1.19, 2.5, 8.5}) {
    for (int n : {1, 2, 4, 9, 20}) {
      const auto r = gauss_laguerre(n, alpha);
      double total = 0;
      for (int i = 0; i < n; ++i) {
        EXPECT_GT(r.weights[i], 0.0);
        if (i > 0) EXPECT_LT(r.nodes[i - 1], r.nodes[i]);
        total += r.weights[i];
      }
      EXPECT_NEAR(total, std::tgamma(alpha + 1), 1e-13 * std::tgamma(alpha + 1));
      for (int k = 0; k <= 2 * n - 1; ++k) {
        const double exact = std::tgamma(alpha + k + 1);
        EXPECT_NEAR(r.integrate([k](double x) { return std::pow(x, k); }), exact, 1e-11 * exact)
            << "alpha=" << alpha << " n=" << n << " k=" << k;
      }
    }
  }
}

TEST(GaussLaguerre, RejectsAlpha)
{
  EXPECT_THROW(gauss_laguerre(3, -1.0), std::invalid_argument);
  EXPECT_THROW(gauss_laguerre(3, -2.0), std::invalid_argument);
}

TEST(GaussLegendre, SmallRules)
{
  auto r = gauss_legendre(1);
  EXPECT_NEAR(r.nodes[0], 0.0, 1e-15);
  EXPECT_NEAR(r.weights[0], 2.0, 1e-14);
  r = gauss_legendre(2);
  EXPECT_NEAR(r.nodes[1], 0.5773503, 1e-7);
  EXPECT_NEAR(r.weights[0], 1.0, 1e-14);
  EXPECT_NEAR(r.integrate([](double x) { return x * x; }), 2.0 / 3.0, 1e-14);
  r = gauss_legendre(8);
  EXPECT_NEAR(r.integrate([](double x) {
    const double p3 = 0.5 * (5 * x * x * x - 3 * x);
    return p3 * p3;
  }),
              2.0 / 7.0, 1e-14);
}

TEST(GaussLegendre, TotalWeight)
{
  for (int n : {1, 3, 10, 64, 129}) {
    const auto r = gauss_legendre(n);
    double total = 0;
    for (double w : r.weights) total += w;
    EXPECT_NEAR(total, 2.0, 1e-13);
  }
}

TEST(GeneralizedHermite, Moments)
{
  for (double mu : {1.0, 1.5}) {
    const auto r = gauss_generalized_hermite(7, mu);
    for (int k = 0; k <= 13; k += 2) {
      const double exact = std::tgamma(mu + (k + 1) / 2.0);
      EXPECT_NEAR(r.integrate([k](double x) { return std::pow(x, k); }), exact, 1e-12 * exact);
    }
  }
}

TEST(Hermite, Values)
{
  EXPECT_NEAR(eval_hermite_all(0, 3.7)[0], 0.7511255, 1e-7);
  EXPECT_NEAR(eval_hermite_all(1, 1.0)[1], 1.0622519, 1e-7);
  EXPECT_NEAR(eval_hermite_all(2, 0.0)[2], -0.5311260, 1e-7);
}

TEST(Hermite, Orthonormal)
{
  const int N = 40;
  const auto r = gauss_hermite(N + 2);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N + 1, N + 1);
  for (int p = 0; p < r.order(); ++p) {
    const auto h = eval_hermite_all(N, r.nodes[p]);
    for (int i = 0; i <= N; ++i)
      for (int j = 0; j <= N; ++j) G(i, j) += r.weights[p] * h[i] * h[j];
  }
  EXPECT_LT((G - Eigen::MatrixXd::Identity(N + 1, N + 1)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Laguerre, Values)
{
  EXPECT_NEAR(eval_assoc_laguerre_all(0, 0.0, 12.0)[0], 1.0, 1e-15);
  EXPECT_NEAR(eval_assoc_laguerre_all(1, 0.0, 0.0)[1], 1.0, 1e-15);
  EXPECT_NEAR(eval_assoc_laguerre_all(0, 0.5, 3.0)[0], 1.0622519, 1e-7);
  EXPECT_THROW(eval_assoc_laguerre_all(2, 0.0, -1.0), std::domain_error);
}

TEST(Laguerre, Orthonormal)
{
  const int K = 25;
  for (double alpha : {0.0, 0.5, 3.0, 7.5, 16.5}) {
    const auto r = gauss_laguerre(K + 2, alpha);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(K + 1, K + 1);
    for (int p = 0; p < r.order(); ++p) {
      const auto L = eval_assoc_laguerre_all(K, alpha, r.nodes[p]);
      for (int i = 0; i <= K; ++i)
        for (int j = 0; j <= K; ++j) G(i, j) += r.weights[p] * L[i] * L[j];
    }
    EXPECT_LT((G - Eigen::MatrixXd::Identity(K + 1, K + 1)).cwiseAbs().maxCoeff(), 1e-12) << alpha;
  }
}

TEST(SphericalHarmonics, Values)
{
  EXPECT_NEAR(eval_real_sph_harm(0, 0.3, 1.0)[0], 0.2820948, 1e-7);
  EXPECT_NEAR(eval_real_sph_harm(1, 0.0, 0.0)[sph_harm_index(1, 0, Trig::cos)], 0.4886025, 1e-7);
  EXPECT_THROW(eval_real_sph_harm(2, -0.1, 0.0), std::domain_error);
  EXPECT_THROW(eval_real_sph_harm(2, 3.2, 0.0), std::domain_error);
}

TEST(SphericalHarmonics, Orthonormal)
{
  const int L = 12;
  const auto leg = gauss_legendre(L + 2);
  const int nphi = 2 * L + 2;
  const int n = (L + 1) * (L + 1);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < leg.order(); ++a)
    for (int b = 0; b < nphi; ++b) {
      const double phi = 2 * pi * b / nphi;
      const auto y = eval_real_sph_harm(L, std::acos(leg.nodes[a]), phi);
      const double w = leg.weights[a] * 2 * pi / nphi;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G(i, j) += w * y[i] * y[j];
    }
  EXPECT_LT((G - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Lagrange, Collocation)
{
  for (int N : {1, 2, 8, 16, 32}) {
    const auto nodes = gauss_hermite(N + 1).nodes;
    for (int i = 0; i <= N; ++i) {
      const auto l = eval_lagrange_all(N, 1.0, nodes[i]);
      for (int j = 0; j <= N; ++j) EXPECT_NEAR(l[j], i == j ? 1.0 : 0.0, 1e-13);
    }
  }
}

TEST(Lagrange, Values)
{
  const auto l = eval_lagrange_all(1, 1.0, 0.0);
  EXPECT_NEAR(l[0], 0.5, 1e-15);
  EXPECT_NEAR(l[1], 0.5, 1e-15);
  const auto nodes = gauss_hermite(3).nodes;
  const auto e = eval_lagrange_all(2, std::sqrt(2.0), std::sqrt(2.0) * nodes[1]);
  EXPECT_NEAR(e[0], 0.0, 1e-14);
  EXPECT_NEAR(e[1], 1.0, 1e-14);
  EXPECT_NEAR(e[2], 0.0, 1e-14);
}

TEST(Lagrange, ReproducesPolynomialsWhenExtrapolating)
{
  const int N = 16;
  const LagrangeBasis basis = LagrangeBasis::on_hermite_nodes(N);
  auto p = [](double x) { return 1.0 - 0.3 * x + 0.01 * std::pow(x, 5) - 1e-6 * std::pow(x, 16); };
  std::vector<double> c(N + 1);
  for (int i = 0; i <= N; ++i) c[i] = p(basis.nodes()[i]);
  for (double x : {-9.0, -4.2, 0.1, 3.3, 8.5}) {
    const auto l = basis.eval_all(x);
    // far outside the nodes the l_i are large and cancel; measure against sum |c_i l_i|
    double s = 0, partition = 0, scale = 0, lebesgue = 0;
    for (int i = 0; i <= N; ++i) {
      s += c[i] * l[i];
      partition += l[i];
      scale += std::abs(c[i] * l[i]);
      lebesgue += std::abs(l[i]);
    }
    EXPECT_NEAR(s, p(x), 1e-14 * scale);
    EXPECT_NEAR(partition, 1.0, 1e-14 * lebesgue);
  }
}
