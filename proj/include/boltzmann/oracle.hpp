#pragma once

/**
 * @file oracle.hpp
 * @brief Brute-force collision tensor for tiny N, independent of the transform pipeline.
 *
 * q_{n,m,j} = int int int B L_n(v) L_m(w) [L_j(v') - L_j(v)] e^{-|v|^2 - |w|^2} de' dw dv
 * in the scaled frame. With v = (ybar + y)/sqrt2, w = (ybar - y)/sqrt2 (an orthogonal
 * change of variables) and y = rho e, rho on the whole line, e on a hemisphere:
 *
 *   q = 2^{beta/2} int e^{-|ybar|^2} dybar  int e^{-rho^2} |rho|^{2+beta} drho  int_{hemi} de
 *       int b(e.e') [L_j((ybar + rho e')/sqrt2) - L_j(v)] de'
 *
 * Tensor Gauss-Hermite in ybar, generalized Gauss-Hermite in rho, Gauss-Legendre x
 * trapezoid on both spheres. For constant b_theta and beta in {0, 1} every integrand
 * is a polynomial times the rule weight, so the default orders are exact.
 */

#include "binary_io.hpp"
#include "collision.hpp"
#include "kernel.hpp"
#include "parallel.hpp"
#include "specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace boltzmann {

struct OracleOrders
{
  int outer;       // Gauss-Hermite points per ybar axis
  int radial;      // generalized Gauss-Hermite points in rho
  int direction;   // Gauss-Legendre points in cos(theta) of e (full sphere count, even)
  int scattering;  // Gauss-Legendre points in cos(theta') of e'

  /// Exact orders for trial degree N plus `extra` points in every rule.
  static OracleOrders exact_for(int N, int extra = 0)
  {
    OracleOrders o{};
    o.outer = (3 * N + 2) / 2 + extra;
    o.radial = (9 * N + 2) / 2 + extra;
    o.direction = (9 * N + 2) / 2 + extra;
    o.direction += o.direction % 2;
    o.scattering = (3 * N + 2) / 2 + extra;
    return o;
  }
};

class OracleTensor
{
 public:
  static constexpr std::uint32_t cache_version = 1;
  static constexpr int max_N = 4;

  OracleTensor() = default;
  OracleTensor(int N, double beta, Matrix Q)
      : N_(N)
      , beta_(beta)
      , Q_(std::move(Q))
  {
    if (Q_.rows() != dof() * dof() || Q_.cols() != dof()) throw std::invalid_argument("OracleTensor: shape mismatch");
  }

  int N() const { return N_; }
  int dof() const { return (N_ + 1) * (N_ + 1) * (N_ + 1); }
  double beta() const { return beta_; }
  /// Row n + dof*m, column j.
  const Matrix& tensor() const { return Q_; }
  double operator()(int n, int m, int j) const { return Q_(n + dof() * m, j); }

  /// q_j = Tbar^{3+beta/2} sum_{n,m} c_n c_m q_{n,m,j}
  std::vector<double> apply(const SpectralDensity& f) const
  {
    if (f.N != N_ || static_cast<int>(f.c.size()) != dof())
      throw std::invalid_argument("oracle_apply: density does not match the oracle degree");
    const int d = dof();
    Vector cc(d * d);
    for (int m = 0; m < d; ++m)
      for (int n = 0; n < d; ++n) cc(n + d * m) = f.c[n] * f.c[m];
    const Vector q = Q_.transpose() * cc;
    const double scale = std::pow(f.Tbar, 3.0 + 0.5 * beta_);
    std::vector<double> out(d);
    for (int j = 0; j < d; ++j) out[j] = scale * q(j);
    return out;
  }

  void save(const std::string& path) const
  {
    io::BinaryWriter w(path, "BGOR", cache_version, static_cast<std::uint32_t>(N_));
    Matrix meta(1, 1);
    meta(0, 0) = beta_;
    w.write_matrix(meta);
    w.write_matrix(Q_);
    w.finish();
  }

  static OracleTensor load(const std::string& path)
  {
    io::BinaryReader r(path, "BGOR");
    if (r.version() != cache_version) throw io::IoError("oracle cache '" + path + "' has a different version");
    const int N = static_cast<int>(r.N());
    const double beta = r.read_matrix()(0, 0);
    Matrix Q = r.read_matrix();
    const int d = (N + 1) * (N + 1) * (N + 1);
    if (Q.rows() != d * d || Q.cols() != d) throw io::IoError("corrupt oracle cache");
    return OracleTensor(N, beta, std::move(Q));
  }

 private:
  int N_ = 0;
  double beta_ = 0;
  Matrix Q_;
};

/**
 * @brief Builds the brute-force tensor; refuses N > 4 (cost grows like N^{15}).
 */
inline OracleTensor build_oracle(int N, const CollisionKernel& kernel, const OracleOrders& orders,
                                 int threads = default_thread_count())
{
  if (N > OracleTensor::max_N) throw std::invalid_argument("build_oracle: N > 4 refused (cost guard)");
  if (N < 0) throw std::invalid_argument("build_oracle: N must be >= 0");
  const double beta = kernel.beta();
  const int d = (N + 1) * (N + 1) * (N + 1);
  const LagrangeBasis lagrange = LagrangeBasis::on_hermite_nodes(N);

  const auto outer = gauss_hermite(orders.outer);
  const auto radial = gauss_generalized_hermite(orders.radial, 1.0 + 0.5 * beta);
  const auto dir_leg = gauss_legendre(orders.direction);
  const auto sc_leg = gauss_legendre(orders.scattering);
  const int dir_phi = 2 * orders.direction;
  const int sc_phi = 2 * orders.scattering;
  const double pi = std::numbers::pi;

  // Hemisphere z > 0 of the direction sphere: (rho, e) and (-rho, -e) give the same y.
  std::vector<std::array<double, 4>> dirs;  // x, y, z, weight
  for (int a = 0; a < dir_leg.order(); ++a) {
    if (dir_leg.nodes[a] <= 0) continue;
    const double z = dir_leg.nodes[a], s = std::sqrt(1 - z * z);
    for (int b = 0; b < dir_phi; ++b) {
      const double ph = 2 * pi * b / dir_phi;
      dirs.push_back({s * std::cos(ph), s * std::sin(ph), z, dir_leg.weights[a] * 2 * pi / dir_phi});
    }
  }
  std::vector<std::array<double, 4>> scat;
  for (int a = 0; a < sc_leg.order(); ++a) {
    const double z = sc_leg.nodes[a], s = std::sqrt(1 - z * z);
    for (int b = 0; b < sc_phi; ++b) {
      const double ph = 2 * pi * b / sc_phi;
      scat.push_back({s * std::cos(ph), s * std::sin(ph), z, sc_leg.weights[a] * 2 * pi / sc_phi});
    }
  }

  auto lagrange3 = [&](const std::array<double, 3>& x, std::vector<double>& out,
                       std::array<std::vector<double>, 3>& tmp) {
    for (int k = 0; k < 3; ++k) lagrange.eval_all(x[k], tmp[k]);
    const int n = N + 1;
    for (int c = 0; c < n; ++c)
      for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) out[a + n * (b + n * c)] = tmp[0][a] * tmp[1][b] * tmp[2][c];
  };

  const double s2 = std::numbers::sqrt2;
  const double scale = std::pow(2.0, 0.5 * beta);
  const int n_outer = orders.outer * orders.outer * orders.outer;
  const int workers = effective_workers(n_outer, threads);
  std::vector<Matrix> partial(workers, Matrix::Zero(d * d, d));

  parallel_chunks(n_outer, workers, [&](int w, int begin, int end) {
    const int chunk = 256;
    Matrix A(chunk, d * d), C(chunk, d);
    std::vector<double> Lv(d), Lw(d), Lp(d), acc(d);
    std::array<std::vector<double>, 3> tmp;
    for (auto& t : tmp) t.resize(N + 1);
    int fill = 0;
    auto flush = [&] {
      if (fill == 0) return;
      partial[w].noalias() += A.topRows(fill).transpose() * C.topRows(fill);
      fill = 0;
    };
    for (int node = begin; node < end; ++node) {
      const int i0 = node % orders.outer, i1 = (node / orders.outer) % orders.outer,
                i2 = node / (orders.outer * orders.outer);
      const std::array<double, 3> yb{outer.nodes[i0], outer.nodes[i1], outer.nodes[i2]};
      const double wb = outer.weights[i0] * outer.weights[i1] * outer.weights[i2];
      for (int r = 0; r < radial.order(); ++r) {
        const double rho = radial.nodes[r];
        for (const auto& e : dirs) {
          const std::array<double, 3> v{(yb[0] + rho * e[0]) / s2, (yb[1] + rho * e[1]) / s2,
                                        (yb[2] + rho * e[2]) / s2};
          const std::array<double, 3> wv{(yb[0] - rho * e[0]) / s2, (yb[1] - rho * e[1]) / s2,
                                         (yb[2] - rho * e[2]) / s2};
          lagrange3(v, Lv, tmp);
          lagrange3(wv, Lw, tmp);
          std::fill(acc.begin(), acc.end(), 0.0);
          double bsum = 0;
          for (const auto& ep : scat) {
            const double mu = e[0] * ep[0] + e[1] * ep[1] + e[2] * ep[2];
            const double wb_theta = ep[3] * kernel.b_theta(mu);
            if (wb_theta == 0) continue;
            bsum += wb_theta;
            const std::array<double, 3> vp{(yb[0] + rho * ep[0]) / s2, (yb[1] + rho * ep[1]) / s2,
                                           (yb[2] + rho * ep[2]) / s2};
            lagrange3(vp, Lp, tmp);
            for (int j = 0; j < d; ++j) acc[j] += wb_theta * Lp[j];
          }
          const double W = scale * wb * radial.weights[r] * e[3];
          for (int j = 0; j < d; ++j) C(fill, j) = acc[j] - bsum * Lv[j];
          for (int m = 0; m < d; ++m)
            for (int n = 0; n < d; ++n) A(fill, n + d * m) = W * Lv[n] * Lw[m];
          if (++fill == chunk) flush();
        }
      }
    }
    flush();
  });

  Matrix Q = Matrix::Zero(d * d, d);
  for (const auto& p : partial) Q += p;
  // symmetrize over the exchange of the two collision partners
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < m; ++n) {
      const Eigen::RowVectorXd avg = 0.5 * (Q.row(n + d * m) + Q.row(m + d * n));
      Q.row(n + d * m) = avg;
      Q.row(m + d * n) = avg;
    }
  return OracleTensor(N, beta, std::move(Q));
}

inline OracleTensor build_oracle(int N, const CollisionKernel& kernel, int extra = 0,
                                 int threads = default_thread_count())
{
  return build_oracle(N, kernel, OracleOrders::exact_for(N, extra), threads);
}

inline std::vector<double> oracle_apply(const OracleTensor& oracle, const SpectralDensity& f)
{
  return oracle.apply(f);
}

}  // namespace boltzmann
