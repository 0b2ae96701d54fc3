#include <boltzmann/bases.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace boltzmann;

namespace {

std::vector<double> random_vector(std::size_t n, unsigned seed)
{
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  std::vector<double> v(n);
  for (auto& x : v) x = dist(gen);
  return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b)
{
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(const Matrix& A) { return A.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(IndexMaps, Counts)
{
  for (int N = 0; N <= 16; ++N) {
    BasisIndexMaps maps(N);
    EXPECT_EQ(static_cast<int>(maps.cylinder().size()), hierarchical_dim(N));
    EXPECT_EQ(static_cast<int>(maps.spherical().size()), hierarchical_dim(N));
    for (const auto& c : maps.cylinder()) EXPECT_LE(c.m, c.i);
  }
  EXPECT_EQ(BasisIndexMaps(2).dim(), 10);
}

TEST(IndexMaps, FlatIndicesMatchEnumeration)
{
  BasisIndexMaps maps(9);
  for (std::size_t n = 0; n < maps.cylinder().size(); ++n) {
    const auto& c = maps.cylinder()[n];
    EXPECT_EQ(BasisIndexMaps::cylinder_index(c.k, c.i, c.j, c.t), static_cast<int>(n));
  }
  for (std::size_t n = 0; n < maps.spherical().size(); ++n) {
    const auto& s = maps.spherical()[n];
    EXPECT_EQ(BasisIndexMaps::spherical_index(s.k, s.l, s.m, s.t), static_cast<int>(n));
  }
}

TEST(Transforms, RejectsSmallN) { EXPECT_THROW(TransformSet(1), std::invalid_argument); }

TEST(Transforms, LagrangeToHermiteEntries)
{
  TransformSet T(2);
  const auto& P = T.lagrange_to_hermite();
  ASSERT_EQ(P.rows(), 3);
  ASSERT_EQ(P.cols(), 5);
  const auto fine = gauss_hermite(5);
  for (int j = 0; j < 5; ++j) EXPECT_NEAR(P(0, j), fine.weights[j] * std::pow(std::numbers::pi, -0.25), 1e-15);
}

TEST(Transforms, SmallBlocks)
{
  TransformSet T(2);
  EXPECT_NEAR(T.hermite_to_cylinder_block(0)(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(T.cylinder_to_spherical_block(0, 0)(0, 0)), 1.0, 1e-14);
}

TEST(Transforms, BlockOrthogonality)
{
  for (int N = 2; N <= 16; ++N) {
    TransformSet T(N);
    for (int i = 0; i <= N; ++i) {
      const auto& B = T.hermite_to_cylinder_block(i);
      EXPECT_LT(max_abs(B.transpose() * B - Matrix::Identity(i + 1, i + 1)), 1e-11) << "N=" << N << " i=" << i;
    }
    for (int k = 0; k <= N; ++k)
      for (int m = 0; m <= k; ++m) {
        const auto& B = T.cylinder_to_spherical_block(k, m);
        EXPECT_LT(max_abs(B.transpose() * B - Matrix::Identity(B.rows(), B.cols())), 1e-11)
            << "N=" << N << " k=" << k << " m=" << m;
      }
  }
}

TEST(Transforms, HermiteToCylinderMatchesDirectProjection)
{
  // Build theta coefficients of a random Hermite expansion by evaluating both
  // bases pointwise and projecting with a tensor rule.
  const int N = 5;
  TransformSet T(N);
  const auto h = random_vector(T.hier_dim(), 3);
  std::vector<double> theta(T.hier_dim());
  T.hermite_to_cylinder(h, theta);

  const auto rule = gauss_hermite(N + 2);
  const int n = rule.order();
  std::vector<double> direct(T.hier_dim(), 0.0);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r) {
        const double x = rule.nodes[p], y = rule.nodes[q], z = rule.nodes[r];
        const auto hx = eval_hermite_all(N, x), hy = eval_hermite_all(N, y), hz = eval_hermite_all(N, z);
        double f = 0;
        for (int k = 0; k <= N; ++k)
          for (int i = 0; i <= k; ++i)
            for (int a = 0; a <= i; ++a) f += h[BasisIndexMaps::hermite_index(k, i, a)] * hx[a] * hy[i - a] * hz[k - i];
        const double w = rule.weights[p] * rule.weights[q] * rule.weights[r];
        for (const auto& c : T.maps().cylinder())
          direct[BasisIndexMaps::cylinder_index(c.k, c.i, c.j, c.t)] +=
              w * f * eval_polar_laguerre(c.i, c.m, c.t, x, y) * hz[c.k - c.i];
      }
  for (int s = 0; s < T.hier_dim(); ++s) EXPECT_NEAR(theta[s], direct[s], 1e-11);
}

TEST(Transforms, FullChainMatchesDirectSphericalProjection)
{
  const int N = 4;
  TransformSet T(N);
  TransformWorkspace ws;
  const auto h = random_vector(T.hier_dim(), 5);
  std::vector<double> theta(T.hier_dim()), phi(T.hier_dim());
  T.hermite_to_cylinder(h, theta);
  T.cylinder_to_spherical(theta, phi, ws);

  const auto rule = gauss_hermite(N + 2);
  const int n = rule.order();
  std::vector<double> direct(T.hier_dim(), 0.0);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r) {
        const double x = rule.nodes[p], y = rule.nodes[q], z = rule.nodes[r];
        const auto hx = eval_hermite_all(N, x), hy = eval_hermite_all(N, y), hz = eval_hermite_all(N, z);
        double f = 0;
        for (int k = 0; k <= N; ++k)
          for (int i = 0; i <= k; ++i)
            for (int a = 0; a <= i; ++a) f += h[BasisIndexMaps::hermite_index(k, i, a)] * hx[a] * hy[i - a] * hz[k - i];
        const double w = rule.weights[p] * rule.weights[q] * rule.weights[r];
        for (const auto& s : T.maps().spherical())
          direct[BasisIndexMaps::spherical_index(s.k, s.l, s.m, s.t)] +=
              w * f * eval_spherical_laguerre(s.k, s.l, s.m, s.t, x, y, z);
      }
  for (int s = 0; s < T.hier_dim(); ++s) EXPECT_NEAR(phi[s], direct[s], 1e-11);
}

TEST(Transforms, RoundTripsAndIsometry)
{
  for (int N = 2; N <= 16; ++N) {
    TransformSet T(N);
    TransformWorkspace ws;
    const auto h = random_vector(T.hier_dim(), 100 + N);
    std::vector<double> theta(T.hier_dim()), phi(T.hier_dim()), theta2(T.hier_dim()), h2(T.hier_dim());
    T.hermite_to_cylinder(h, theta);
    T.cylinder_to_spherical(theta, phi, ws);
    EXPECT_NEAR(std::sqrt(dot(phi, phi)), std::sqrt(dot(h, h)), 1e-11 * std::sqrt(dot(h, h)));
    EXPECT_NEAR(dot(phi, phi), dot(theta, theta), 1e-11 * dot(h, h));
    T.spherical_to_cylinder(phi, theta2, ws);
    T.cylinder_to_hermite(theta2, h2);
    for (int s = 0; s < T.hier_dim(); ++s) {
      EXPECT_NEAR(theta2[s], theta[s], 1e-11);
      EXPECT_NEAR(h2[s], h[s], 1e-11);
    }
  }
}

TEST(Transforms, ZeroMapsToZero)
{
  TransformSet T(6);
  TransformWorkspace ws;
  std::vector<double> z(T.hier_dim(), 0.0), out(T.hier_dim(), 1.0), out2(T.hier_dim(), 1.0);
  T.hermite_to_cylinder(z, out);
  T.cylinder_to_spherical(out, out2, ws);
  for (double v : out2) EXPECT_EQ(v, 0.0);
  std::vector<double> e(T.fine_dim(), 0.0), h(T.hier_dim(), 1.0);
  T.nodal_to_hermite(e, h, ws);
  for (double v : h) EXPECT_EQ(v, 0.0);
}

TEST(Transforms, DegreeLocality)
{
  const int N = 8;
  TransformSet T(N);
  TransformWorkspace ws;
  for (int k = 0; k <= N; ++k) {
    std::vector<double> h(T.hier_dim(), 0.0), theta(T.hier_dim()), phi(T.hier_dim());
    const auto r = random_vector(T.hier_dim(), k);
    for (int s = degree_offset(k); s < degree_offset(k + 1); ++s) h[s] = r[s];
    T.hermite_to_cylinder(h, theta);
    T.cylinder_to_spherical(theta, phi, ws);
    for (int s = 0; s < T.hier_dim(); ++s) {
      if (s >= degree_offset(k) && s < degree_offset(k + 1)) continue;
      EXPECT_EQ(theta[s], 0.0);
      EXPECT_EQ(phi[s], 0.0);
    }
  }
}

TEST(Transforms, AdjointsMatchEuclideanPairing)
{
  for (auto trunc : {Truncation::degree_N, Truncation::degree_2N}) {
    TransformSet T(5, trunc);
    TransformWorkspace ws;
    const auto a = random_vector(T.hier_dim(), 1), b = random_vector(T.hier_dim(), 2);
    std::vector<double> Fa(T.hier_dim()), Ftb(T.hier_dim());
    T.hermite_to_cylinder(a, Fa);
    T.cylinder_to_hermite(b, Ftb);
    EXPECT_NEAR(dot(Fa, b), dot(a, Ftb), 1e-12 * T.hier_dim());
    T.cylinder_to_spherical(a, Fa, ws);
    T.spherical_to_cylinder(b, Ftb, ws);
    EXPECT_NEAR(dot(Fa, b), dot(a, Ftb), 1e-12 * T.hier_dim());

    const auto e = random_vector(T.fine_dim(), 3);
    std::vector<double> He(T.hier_dim()), Htb(T.fine_dim());
    T.nodal_to_hermite(e, He, ws);
    T.nodal_to_hermite_transpose(b, Htb, ws);
    EXPECT_NEAR(dot(He, b), dot(e, Htb), 1e-11 * T.fine_dim());

    // transpose applied to a unit vector reproduces a row of the forward map
    std::vector<double> unit(T.hier_dim(), 0.0), col(T.hier_dim()), fwd(T.hier_dim());
    const int m = T.hier_dim() / 2;
    unit[m] = 1.0;
    T.cylinder_to_hermite(unit, col);
    for (int s = 0; s < T.hier_dim(); ++s) {
      std::vector<double> es(T.hier_dim(), 0.0);
      es[s] = 1.0;
      T.hermite_to_cylinder(es, fwd);
      EXPECT_NEAR(col[s], fwd[m], 1e-15);
    }
  }
}

TEST(Transforms, NodalToHermiteOfConstantAndProduct)
{
  const int N = 3;
  TransformSet T(N);
  TransformWorkspace ws;
  const auto& fine = T.fine_rule();
  const int nf = fine.order();
  std::vector<double> e(T.fine_dim(), 1.0), h(T.hier_dim());
  T.nodal_to_hermite(e, h, ws);
  EXPECT_NEAR(h[0], std::pow(std::numbers::pi, 0.75), 1e-13);
  EXPECT_NEAR(h[0], 2.3597305, 1e-7);
  for (int s = 1; s < T.hier_dim(); ++s) EXPECT_NEAR(h[s], 0.0, 1e-13);

  for (int p = 0; p < nf; ++p)
    for (int q = 0; q < nf; ++q)
      for (int r = 0; r < nf; ++r)
        e[p + nf * (q + nf * r)] = eval_hermite_all(1, fine.nodes[p])[1] * eval_hermite_all(2, fine.nodes[q])[2];
  T.nodal_to_hermite(e, h, ws);
  const double mass = std::pow(std::numbers::pi, 0.25);  // h_0^{-1} from the v3 direction
  for (int s = 0; s < T.hier_dim(); ++s) {
    const double expected = s == BasisIndexMaps::hermite_index(3, 3, 1) ? mass : 0.0;
    EXPECT_NEAR(h[s], expected, 1e-12) << s;
  }
}

TEST(Transforms, NodalToHermiteReproducesLowDegreePolynomials)
{
  // Project a random element of P^N sampled on the fine nodes; the transpose of
  // the orthonormal Hermite evaluation recovers the same coefficients.
  const int N = 6;
  TransformSet T(N);
  TransformWorkspace ws;
  const auto coef = random_vector(T.hier_dim(), 11);
  const auto& fine = T.fine_rule();
  const int nf = fine.order();
  std::vector<double> e(T.fine_dim());
  for (int p = 0; p < nf; ++p)
    for (int q = 0; q < nf; ++q)
      for (int r = 0; r < nf; ++r) {
        const auto hx = eval_hermite_all(N, fine.nodes[p]), hy = eval_hermite_all(N, fine.nodes[q]),
                   hz = eval_hermite_all(N, fine.nodes[r]);
        double f = 0;
        for (int k = 0; k <= N; ++k)
          for (int i = 0; i <= k; ++i)
            for (int a = 0; a <= i; ++a) f += coef[BasisIndexMaps::hermite_index(k, i, a)] * hx[a] * hy[i - a] * hz[k - i];
        e[p + nf * (q + nf * r)] = f;
      }
  std::vector<double> h(T.hier_dim());
  T.nodal_to_hermite(e, h, ws);
  for (int s = 0; s < T.hier_dim(); ++s) EXPECT_NEAR(h[s], coef[s], 1e-11);
}

TEST(Transforms, FullTruncationKeepsEveryProductMode)
{
  // a tensor polynomial of per-axis degree 2N is recovered exactly, including
  // modes of total degree above 2N
  const int N = 2;
  TransformSet T(N, Truncation::full);
  EXPECT_EQ(T.truncation_degree(), 6 * N);
  for (int a = 2 * N + 1; a <= 6 * N; ++a) EXPECT_EQ(T.lagrange_to_hermite().row(a).cwiseAbs().maxCoeff(), 0.0);
  TransformWorkspace ws;
  const auto& fine = T.fine_rule();
  const int nf = fine.order();
  std::mt19937_64 gen(3);
  std::normal_distribution<double> dist;
  std::vector<double> coef(nf * nf * nf);
  for (auto& x : coef) x = dist(gen);
  std::vector<double> e(T.fine_dim(), 0.0);
  for (int p = 0; p < nf; ++p)
    for (int q = 0; q < nf; ++q)
      for (int r = 0; r < nf; ++r) {
        const auto hx = eval_hermite_all(2 * N, fine.nodes[p]), hy = eval_hermite_all(2 * N, fine.nodes[q]),
                   hz = eval_hermite_all(2 * N, fine.nodes[r]);
        double f = 0;
        for (int c = 0; c < nf; ++c)
          for (int b = 0; b < nf; ++b)
            for (int a = 0; a < nf; ++a) f += coef[a + nf * (b + nf * c)] * hx[a] * hy[b] * hz[c];
        e[p + nf * (q + nf * r)] = f;
      }
  std::vector<double> h(T.hier_dim());
  T.nodal_to_hermite(e, h, ws);
  const int K = T.truncation_degree();
  for (int k = 0; k <= K; ++k)
    for (int i = 0; i <= k; ++i)
      for (int a = 0; a <= i; ++a) {
        const int b = i - a, c = k - i;
        const double expected = (a <= 2 * N && b <= 2 * N && c <= 2 * N) ? coef[a + nf * (b + nf * c)] : 0.0;
        EXPECT_NEAR(h[BasisIndexMaps::hermite_index(k, i, a)], expected, 1e-12);
      }
  EXPECT_THROW(TransformSet(2, 13), std::invalid_argument);
}

TEST(Shift, RowSumsAndCollocation)
{
  const int N = 6;
  TransformSet T(N);
  for (double vbar : {-1.7, 0.0, 0.4, 2.2}) {
    const Matrix S = T.shift_1d(vbar);
    ASSERT_EQ(S.rows(), 2 * N + 1);
    ASSERT_EQ(S.cols(), N + 1);
    for (int j = 0; j < S.rows(); ++j) EXPECT_NEAR(S.row(j).sum(), 1.0, 1e-12);
  }
  // vbar chosen so that vbar + mu_0 hits collocation node 2
  const double vbar = T.coarse_rule().nodes[2] - T.fine_rule().nodes[0] / std::numbers::sqrt2;
  const Matrix S = T.shift_1d(vbar);
  for (int i = 0; i <= N; ++i) EXPECT_NEAR(S(0, i), i == 2 ? 1.0 : 0.0, 1e-12);
}

TEST(Shift, ReproducesPolynomials)
{
  const int N = 7;
  TransformSet T(N);
  const auto c = random_vector(N + 1, 9);
  auto p = [&](double x) {
    double s = 0;
    for (int k = 0; k <= N; ++k) s += c[k] * std::pow(x, k) / (k + 1);
    return s;
  };
  Vector samples(N + 1);
  for (int i = 0; i <= N; ++i) samples(i) = p(T.coarse_rule().nodes[i]);
  const double vbar = 0.83;
  const Vector shifted = T.shift_1d(vbar) * samples;
  for (int j = 0; j < 2 * N + 1; ++j) {
    const double x = vbar + T.fine_rule().nodes[j] / std::numbers::sqrt2;
    EXPECT_NEAR(shifted(j), p(x), 1e-11 * std::max(1.0, std::abs(p(x))));
  }
}

TEST(Shift, ThreeDimensional)
{
  const int N = 4;
  TransformSet T(N);
  TransformWorkspace ws;
  const int nc = N + 1, nf = 2 * N + 1;
  std::vector<double> c(T.nodal_dim(), 1.0), out(T.fine_dim());
  T.shift_3d(c, {0.0, 0.0, 0.0}, out, ws);
  for (double v : out) EXPECT_NEAR(v, 1.0, 1e-12);

  const auto& xc = T.coarse_rule().nodes;
  for (int a = 0; a < nc; ++a)
    for (int b = 0; b < nc; ++b)
      for (int d = 0; d < nc; ++d) c[a + nc * (b + nc * d)] = xc[a] + 2 * xc[b] * xc[d];
  const std::array<double, 3> vbar{0.3, -0.9, 1.4};
  T.shift_3d(c, vbar, out, ws);
  const auto& xf = T.fine_rule().nodes;
  auto p = [](double x, double y, double z) { return x + 2 * y * z; };
  for (int a = 0; a < nf; ++a)
    for (int b = 0; b < nf; ++b)
      for (int d = 0; d < nf; ++d) {
        const double mu[3] = {xf[a] / std::numbers::sqrt2, xf[b] / std::numbers::sqrt2, xf[d] / std::numbers::sqrt2};
        const int j = a + nf * (b + nf * d);
        EXPECT_NEAR(out[j], p(vbar[0] + mu[0], vbar[1] + mu[1], vbar[2] + mu[2]), 1e-11);
        // reversed flat index evaluates at vbar - mu
        EXPECT_NEAR(out[T.fine_dim() - 1 - j], p(vbar[0] - mu[0], vbar[1] - mu[1], vbar[2] - mu[2]), 1e-11);
      }
}

TEST(Transforms, CacheRoundTrip)
{
  const std::string path = ::testing::TempDir() + "/bgts_test.bgts";
  TransformSet T(5, Truncation::degree_2N);
  T.save(path);
  const auto U = TransformSet::load(path, 5, Truncation::degree_2N);
  EXPECT_EQ(U.truncation_degree(), 10);
  EXPECT_EQ(max_abs(U.lagrange_to_hermite() - T.lagrange_to_hermite()), 0.0);
  for (int k = 0; k <= 10; ++k) {
    EXPECT_EQ(max_abs(U.hermite_to_cylinder_block(k) - T.hermite_to_cylinder_block(k)), 0.0);
    for (int m = 0; m <= k; ++m)
      EXPECT_EQ(max_abs(U.cylinder_to_spherical_block(k, m) - T.cylinder_to_spherical_block(k, m)), 0.0);
  }
  EXPECT_THROW(TransformSet::load(path, 6, Truncation::degree_2N), io::IoError);
  EXPECT_THROW(TransformSet::load(path, 5, Truncation::degree_N), io::IoError);
}
