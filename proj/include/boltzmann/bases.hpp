#pragma once

/**
 * @file bases.hpp
 * @brief Index sets of the nodal, Hermite, cylinder Hermite and spherical
 *        Laguerre bases, and the transforms between them.
 *
 * Bases (all orthonormal w.r.t. e^{-|v|^2} except the nodal one):
 *  - nodal:      tensor Lagrange polynomials on the (N+1)^3 Gauss-Hermite nodes
 *  - Hermite:    h_a(v1) h_b(v2) h_c(v3), total degree <= K
 *  - cylinder:   Psi^t_{i,m}(v1,v2) h_{k-i}(v3) with
 *                Psi = gamma_m Re/Im((v1 + i v2)^m) L^m_{(i-m)/2}(v1^2 + v2^2)
 *  - spherical:  sqrt(2) s_m Pbar_l^m(cos theta) trig(m phi) r^l L^{l+1/2}_{(k-l)/2}(r^2)
 *
 * Flat layouts, degree k' blocks of size (k'+1)(k'+2)/2 at offset k'(k'+1)(k'+2)/6:
 *  - Hermite   (k', i', a) -> degrees (a, i'-a, k'-i'), a = 0..i'
 *  - cylinder  (k', i') block of size i'+1: [cos j = 0..i'/2, sin j where m = 2j + i'%2 > 0]
 *  - spherical per degree k': l = k'%2, k'%2+2, .., k', each [cos m = 0..l, sin m = 1..l]
 *
 * The Hermite -> cylinder map is block diagonal in (k', i') with a block that only
 * depends on i'. The cylinder -> spherical map couples only entries with equal
 * (k', m, t); each (k', m) block is square and shared by the cos and sin parts.
 */

#include "binary_io.hpp"
#include "specfun.hpp"
#include "tensor.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace boltzmann {

/// Total-degree truncation of the Hermite projection of f2.
enum class Truncation { degree_N, degree_2N, full };

/// Hermite truncation degree K; `full` keeps every mode of a per-axis degree-2N product.
inline int truncation_degree(int N, Truncation t)
{
  switch (t) {
    case Truncation::degree_N: return N;
    case Truncation::degree_2N: return 2 * N;
    case Truncation::full: return 6 * N;
  }
  throw std::invalid_argument("unknown truncation");
}

inline const char* truncation_suffix(Truncation t)
{
  return t == Truncation::degree_N ? "" : t == Truncation::degree_2N ? "_2N" : "_full";
}

inline int hierarchical_dim(int K) { return (K + 1) * (K + 2) * (K + 3) / 6; }
inline int degree_offset(int k) { return k * (k + 1) * (k + 2) / 6; }

struct CylinderIndex
{
  int k, i, j, m;
  Trig t;
};

struct SphericalIndex
{
  int k, l, m;
  Trig t;
  int radial() const { return (k - l) / 2; }
};

class BasisIndexMaps
{
 public:
  explicit BasisIndexMaps(int K)
      : K_(K)
  {
    if (K < 0) throw std::invalid_argument("BasisIndexMaps: degree must be >= 0");
    for (int k = 0; k <= K; ++k) {
      for (int i = 0; i <= k; ++i) {
        for (int j = 0; j <= i / 2; ++j) cylinder_.push_back({k, i, j, 2 * j + i % 2, Trig::cos});
        for (int j = 0; j <= i / 2; ++j)
          if (2 * j + i % 2 > 0) cylinder_.push_back({k, i, j, 2 * j + i % 2, Trig::sin});
      }
      for (int l = k % 2; l <= k; l += 2) {
        for (int m = 0; m <= l; ++m) spherical_.push_back({k, l, m, Trig::cos});
        for (int m = 1; m <= l; ++m) spherical_.push_back({k, l, m, Trig::sin});
      }
    }
  }

  int degree() const { return K_; }
  int dim() const { return hierarchical_dim(K_); }

  static int hermite_index(int k, int i, int a) { return degree_offset(k) + i * (i + 1) / 2 + a; }

  static int cylinder_index(int k, int i, int j, Trig t)
  {
    const int base = degree_offset(k) + i * (i + 1) / 2;
    if (t == Trig::cos) return base + j;
    return base + i / 2 + 1 + j - (i % 2 == 0 ? 1 : 0);
  }

  static int spherical_index(int k, int l, int m, Trig t)
  {
    const int base = degree_offset(k) + l * (l - 1) / 2;
    return base + (t == Trig::cos ? m : l + m);
  }

  const std::vector<CylinderIndex>& cylinder() const { return cylinder_; }
  const std::vector<SphericalIndex>& spherical() const { return spherical_; }

 private:
  int K_;
  std::vector<CylinderIndex> cylinder_;
  std::vector<SphericalIndex> spherical_;
};

namespace detail {

/// Re/Im of (x + i y)^m
inline std::array<double, 2> complex_power(double x, double y, int m)
{
  std::complex<double> z(1.0, 0.0);
  const std::complex<double> b(x, y);
  for (int k = 0; k < m; ++k) z *= b;
  return {z.real(), z.imag()};
}

inline double polar_gamma(int m) { return std::sqrt((m == 0 ? 1.0 : 2.0) / std::numbers::pi); }

}  // namespace detail

/**
 * @brief Value of the 2D polar-Laguerre function Psi^t_{i,m}(v1, v2).
 */
inline double eval_polar_laguerre(int i, int m, Trig t, double v1, double v2)
{
  const auto [re, im] = detail::complex_power(v1, v2, m);
  const auto L = eval_assoc_laguerre_all((i - m) / 2, m, v1 * v1 + v2 * v2);
  return detail::polar_gamma(m) * (t == Trig::cos ? re : im) * L.back();
}

/**
 * @brief Value of the spherical Laguerre function of degree k, angular degree l, order m.
 */
inline double eval_spherical_laguerre(int k, int l, int m, Trig t, double v1, double v2, double v3)
{
  const double r2 = v1 * v1 + v2 * v2 + v3 * v3;
  const double r = std::sqrt(r2);
  const double x = r > 0 ? v3 / r : 1.0;
  const double phi = std::atan2(v2, v1);
  NormalizedLegendre P(l);
  P.evaluate(x);
  const double sm = m == 0 ? 1.0 : std::numbers::sqrt2;
  const double trig = t == Trig::cos ? std::cos(m * phi) : std::sin(m * phi);
  const auto L = eval_assoc_laguerre_all((k - l) / 2, l + 0.5, r2);
  return std::numbers::sqrt2 * sm * P(l, m) * trig * std::pow(r, l) * L.back();
}

/// Scratch for the hierarchical transforms.
struct TransformWorkspace
{
  TensorScratch tensor;
  std::vector<double> cube;   // (K+1)^3
  std::vector<double> gather, scatter;
};

/**
 * @brief Precomputed transforms for trial degree N and Hermite truncation degree K.
 *
 * Immutable after construction; safe to share across threads.
 */
class TransformSet
{
 public:
  static constexpr std::uint32_t cache_version = 1;

  TransformSet(int N, Truncation truncation = Truncation::degree_N)
      : TransformSet(N, boltzmann::truncation_degree(N, truncation))
  {
  }

  TransformSet(int N, int K)
      : N_(N)
      , K_(K)
      , maps_(K)
  {
    if (N < 2) throw std::invalid_argument("TransformSet: N must be >= 2");
    if (K < N || K > 6 * N) throw std::invalid_argument("TransformSet: truncation degree must lie in [N, 6N]");
    init_rules();
    build_lagrange_to_hermite();
    build_hermite_to_cylinder();
    build_cylinder_to_spherical();
    build_plans();
  }

  int N() const { return N_; }
  int truncation_degree() const { return K_; }
  const BasisIndexMaps& maps() const { return maps_; }
  int nodal_dim() const { return (N_ + 1) * (N_ + 1) * (N_ + 1); }
  int fine_dim() const { return (2 * N_ + 1) * (2 * N_ + 1) * (2 * N_ + 1); }
  int hier_dim() const { return maps_.dim(); }

  /// (N+1)-point rule of the trial space and (2N+1)-point rule of the relative velocity.
  const QuadratureRule& coarse_rule() const { return coarse_; }
  const QuadratureRule& fine_rule() const { return fine_; }
  const LagrangeBasis& lagrange() const { return lagrange_; }

  /// (K+1) x (2N+1), entries w_j h_a(x_j) on the fine rule.
  const Matrix& lagrange_to_hermite() const { return P_LH_; }
  /// Block i' of the Hermite -> cylinder map, rows in cylinder order, columns a.
  const Matrix& hermite_to_cylinder_block(int i) const { return P_HTheta_.at(i); }
  /// Block (k', m) of the cylinder -> spherical map, rows l ascending, columns i' ascending.
  const Matrix& cylinder_to_spherical_block(int k, int m) const { return P_ThetaPhi_.at(block_id(k, m)); }

  /// S_{ji} = l_i(vbar + mu_j), mu_j = x_j / sqrt(2) on the fine rule.
  Matrix shift_1d(double vbar) const
  {
    const int nf = 2 * N_ + 1;
    Matrix S(nf, N_ + 1);
    std::vector<double> row(N_ + 1);
    for (int j = 0; j < nf; ++j) {
      lagrange_.eval_all(vbar + fine_.nodes[j] / std::numbers::sqrt2, row);
      for (int i = 0; i <= N_; ++i) S(j, i) = row[i];
    }
    return S;
  }

  /// p(vbar + mu_j) on the fine tensor nodes from the nodal coefficients of p.
  void shift_3d(std::span<const double> c, const std::array<double, 3>& vbar, std::span<double> out,
                TransformWorkspace& ws) const
  {
    check(c.size(), nodal_dim(), "shift_3d");
    check(out.size(), fine_dim(), "shift_3d");
    apply_axes(shift_1d(vbar[0]), shift_1d(vbar[1]), shift_1d(vbar[2]), c.data(), out.data(), ws.tensor);
  }

  /// Hermite coefficients (total degree <= K) of the fine-node interpolant e.
  void nodal_to_hermite(std::span<const double> e, std::span<double> h, TransformWorkspace& ws) const
  {
    check(e.size(), fine_dim(), "nodal_to_hermite");
    check(h.size(), hier_dim(), "nodal_to_hermite");
    ws.cube.resize(cube_dim());
    apply_axes(P_LH_, P_LH_, P_LH_, e.data(), ws.cube.data(), ws.tensor);
    for (std::size_t n = 0; n < hermite_cube_.size(); ++n) h[n] = ws.cube[hermite_cube_[n]];
  }

  /// Adjoint of nodal_to_hermite.
  void nodal_to_hermite_transpose(std::span<const double> h, std::span<double> e, TransformWorkspace& ws) const
  {
    check(h.size(), hier_dim(), "nodal_to_hermite_transpose");
    check(e.size(), fine_dim(), "nodal_to_hermite_transpose");
    scatter_to_cube(h, ws);
    const Matrix Pt = P_LH_.transpose();
    apply_axes(Pt, Pt, Pt, ws.cube.data(), e.data(), ws.tensor);
  }

  /// Hermite coefficients embedded into the (K+1)^3 cube (zeros above total degree K).
  void scatter_to_cube(std::span<const double> h, TransformWorkspace& ws) const
  {
    ws.cube.assign(cube_dim(), 0.0);
    for (std::size_t n = 0; n < hermite_cube_.size(); ++n) ws.cube[hermite_cube_[n]] = h[n];
  }

  void hermite_to_cylinder(std::span<const double> h, std::span<double> theta) const
  {
    check(h.size(), hier_dim(), "hermite_to_cylinder");
    check(theta.size(), hier_dim(), "hermite_to_cylinder");
    for (int k = 0; k <= K_; ++k)
      for (int i = 0; i <= k; ++i) {
        const int o = BasisIndexMaps::hermite_index(k, i, 0);
        Eigen::Map<const Vector> x(h.data() + o, i + 1);
        Eigen::Map<Vector> y(theta.data() + o, i + 1);
        y.noalias() = P_HTheta_[i] * x;
      }
  }

  void cylinder_to_hermite(std::span<const double> theta, std::span<double> h) const
  {
    check(h.size(), hier_dim(), "cylinder_to_hermite");
    check(theta.size(), hier_dim(), "cylinder_to_hermite");
    for (int k = 0; k <= K_; ++k)
      for (int i = 0; i <= k; ++i) {
        const int o = BasisIndexMaps::hermite_index(k, i, 0);
        Eigen::Map<const Vector> x(theta.data() + o, i + 1);
        Eigen::Map<Vector> y(h.data() + o, i + 1);
        y.noalias() = P_HTheta_[i].transpose() * x;
      }
  }

  void cylinder_to_spherical(std::span<const double> theta, std::span<double> phi, TransformWorkspace& ws) const
  {
    check(theta.size(), hier_dim(), "cylinder_to_spherical");
    check(phi.size(), hier_dim(), "cylinder_to_spherical");
    apply_block_plans(theta, phi, ws, false);
  }

  void spherical_to_cylinder(std::span<const double> phi, std::span<double> theta, TransformWorkspace& ws) const
  {
    check(theta.size(), hier_dim(), "spherical_to_cylinder");
    check(phi.size(), hier_dim(), "spherical_to_cylinder");
    apply_block_plans(phi, theta, ws, true);
  }

  /// Doubles held by the precomputed matrices.
  std::size_t storage_doubles() const
  {
    std::size_t n = P_LH_.size();
    for (const auto& B : P_HTheta_) n += B.size();
    for (const auto& B : P_ThetaPhi_) n += B.size();
    return n;
  }

  /// Index of the (K+1)^3 cube entry holding Hermite coefficient n.
  const std::vector<int>& hermite_cube_index() const { return hermite_cube_; }
  int cube_dim() const { return (K_ + 1) * (K_ + 1) * (K_ + 1); }

  void save(const std::string& path) const
  {
    io::BinaryWriter w(path, "BGTS", cache_version, static_cast<std::uint32_t>(N_));
    w.write_matrix(P_LH_);
    for (const auto& B : P_HTheta_) w.write_matrix(B);
    for (const auto& B : P_ThetaPhi_) w.write_matrix(B);
    w.finish();
  }

  /// Loads a cache written by save(); throws io::IoError on any mismatch.
  static TransformSet load(const std::string& path, int N, Truncation truncation)
  {
    const int K = boltzmann::truncation_degree(N, truncation);
    io::BinaryReader r(path, "BGTS");
    if (r.version() != cache_version || static_cast<int>(r.N()) != N)
      throw io::IoError("transform cache '" + path + "' does not match N / version");
    TransformSet T(N, K, Deferred{});
    T.P_LH_ = r.read_matrix();
    if (T.P_LH_.rows() != K + 1 || T.P_LH_.cols() != 2 * N + 1)
      throw io::IoError("transform cache '" + path + "' has a different truncation degree");
    T.P_HTheta_.resize(K + 1);
    for (int i = 0; i <= K; ++i) {
      T.P_HTheta_[i] = r.read_matrix();
      if (T.P_HTheta_[i].rows() != i + 1 || T.P_HTheta_[i].cols() != i + 1) throw io::IoError("corrupt cache");
    }
    for (int k = 0; k <= K; ++k)
      for (int m = 0; m <= k; ++m) {
        auto B = r.read_matrix();
        const int n = (k - m) / 2 + 1;
        if (B.rows() != n || B.cols() != n) throw io::IoError("corrupt cache");
        T.P_ThetaPhi_.push_back(std::move(B));
      }
    T.build_plans();
    return T;
  }

  /// Loads from the cache directory when possible, otherwise builds and stores.
  static TransformSet cached(const std::string& cache_dir, int N, Truncation truncation)
  {
    if (cache_dir.empty()) return TransformSet(N, truncation);
    const std::string path = cache_dir + "/transforms_N" + std::to_string(N) +
                             truncation_suffix(truncation) + ".bgts";
    try {
      return load(path, N, truncation);
    } catch (const io::IoError&) {
    }
    TransformSet T(N, truncation);
    T.save(path);
    return T;
  }

 private:
  struct Deferred
  {
  };

  TransformSet(int N, int K, Deferred)
      : N_(N)
      , K_(K)
      , maps_(K)
  {
    init_rules();
  }

  struct BlockPlan
  {
    int block;
    std::vector<int> cyl;
    std::vector<int> sph;
  };

  static void check(std::size_t got, int expected, const char* who)
  {
    if (static_cast<int>(got) != expected)
      throw std::invalid_argument(std::string(who) + ": expected " + std::to_string(expected) + " entries, got " +
                                  std::to_string(got));
  }

  static int block_id(int k, int m) { return k * (k + 1) / 2 + m; }

  void init_rules()
  {
    coarse_ = gauss_hermite(N_ + 1);
    fine_ = gauss_hermite(2 * N_ + 1);
    lagrange_ = LagrangeBasis(coarse_.nodes);
  }

  void build_lagrange_to_hermite()
  {
    const int nf = fine_.order();
    P_LH_.resize(K_ + 1, nf);
    std::vector<double> h(K_ + 1);
    for (int j = 0; j < nf; ++j) {
      eval_hermite_all(K_, fine_.nodes[j], h);
      // modes above 2N vanish for products of two degree-N factors and the rule cannot resolve them
      for (int a = 0; a <= K_; ++a) P_LH_(a, j) = a <= 2 * N_ ? fine_.weights[j] * h[a] : 0.0;
    }
  }

  void build_hermite_to_cylinder()
  {
    P_HTheta_.resize(K_ + 1);
    for (int i = 0; i <= K_; ++i) {
      const auto rule = gauss_hermite(i + 2);
      const int n = rule.order();
      Matrix B = Matrix::Zero(i + 1, i + 1);
      std::vector<double> hx(i + 1), hy(i + 1);
      for (int p = 0; p < n; ++p) {
        eval_hermite_all(i, rule.nodes[p], hx);
        for (int q = 0; q < n; ++q) {
          eval_hermite_all(i, rule.nodes[q], hy);
          const double w = rule.weights[p] * rule.weights[q];
          for (int j = 0; j <= i / 2; ++j) {
            const int m = 2 * j + i % 2;
            for (Trig t : {Trig::cos, Trig::sin}) {
              if (t == Trig::sin && m == 0) continue;
              const int row = BasisIndexMaps::cylinder_index(0, i, j, t) - BasisIndexMaps::hermite_index(0, i, 0);
              const double psi = eval_polar_laguerre(i, m, t, rule.nodes[p], rule.nodes[q]);
              for (int a = 0; a <= i; ++a) B(row, a) += w * psi * hx[a] * hy[i - a];
            }
          }
        }
      }
      P_HTheta_[i] = std::move(B);
    }
  }

  void build_cylinder_to_spherical()
  {
    P_ThetaPhi_.clear();
    P_ThetaPhi_.reserve(block_id(K_ + 1, 0));
    for (int k = 0; k <= K_; ++k) {
      const auto lag = gauss_laguerre(k / 2 + 2, 0.5);
      const auto leg = gauss_legendre(k + 2);
      std::vector<Matrix> blocks;
      for (int m = 0; m <= k; ++m) blocks.push_back(Matrix::Zero((k - m) / 2 + 1, (k - m) / 2 + 1));

      NormalizedLegendre P(k);
      std::vector<double> hz(k + 1);
      std::vector<std::vector<double>> cyl_lag(k + 1), sph_lag(k + 1);
      for (int s_i = 0; s_i < lag.order(); ++s_i) {
        const double s = lag.nodes[s_i];
        const double r = std::sqrt(s);
        for (int l = 0; l <= k; ++l) sph_lag[l] = eval_assoc_laguerre_all((k - l) / 2, l + 0.5, s);
        for (int x_i = 0; x_i < leg.order(); ++x_i) {
          const double x = leg.nodes[x_i];
          const double sin_t = std::sqrt(std::max(0.0, 1.0 - x * x));
          const double rho = r * sin_t;
          const double z = r * x;
          const double w = lag.weights[s_i] * leg.weights[x_i];
          P.evaluate(x);
          eval_hermite_all(k, z, hz);
          for (int m = 0; m <= k; ++m) cyl_lag[m] = eval_assoc_laguerre_all((k - m) / 2, m, rho * rho);
          for (int m = 0; m <= k; ++m) {
            const double rho_m = std::pow(rho, m);
            const double c_phi = m == 0 ? 2 * std::numbers::pi : std::numbers::pi;
            const double sm = m == 0 ? 1.0 : std::numbers::sqrt2;
            const double pref = w * 0.5 * c_phi * std::numbers::sqrt2 * detail::polar_gamma(m) * sm;
            auto& B = blocks[m];
            const int l0 = m + (k - m) % 2;
            for (int c = 0; c < B.cols(); ++c) {
              const int i = m + 2 * c;
              const double theta = rho_m * cyl_lag[m][(i - m) / 2] * hz[k - i];
              for (int rr = 0; rr < B.rows(); ++rr) {
                const int l = l0 + 2 * rr;
                const double phi = P(l, m) * std::pow(r, l) * sph_lag[l][(k - l) / 2];
                B(rr, c) += pref * theta * phi;
              }
            }
          }
        }
      }
      for (auto& B : blocks) P_ThetaPhi_.push_back(std::move(B));
    }
  }

  void build_plans()
  {
    hermite_cube_.resize(hier_dim());
    const int d = K_ + 1;
    for (int k = 0; k <= K_; ++k)
      for (int i = 0; i <= k; ++i)
        for (int a = 0; a <= i; ++a)
          hermite_cube_[BasisIndexMaps::hermite_index(k, i, a)] = a + d * ((i - a) + d * (k - i));

    plans_.clear();
    for (int k = 0; k <= K_; ++k)
      for (int m = 0; m <= k; ++m)
        for (Trig t : {Trig::cos, Trig::sin}) {
          if (t == Trig::sin && m == 0) continue;
          BlockPlan plan{block_id(k, m), {}, {}};
          for (int i = m; i <= k; i += 2)
            plan.cyl.push_back(BasisIndexMaps::cylinder_index(k, i, m / 2, t));
          for (int l = m + (k - m) % 2; l <= k; l += 2)
            plan.sph.push_back(BasisIndexMaps::spherical_index(k, l, m, t));
          plans_.push_back(std::move(plan));
        }
  }

  void apply_block_plans(std::span<const double> in, std::span<double> out, TransformWorkspace& ws,
                         bool transpose) const
  {
    for (const auto& plan : plans_) {
      const auto& B = P_ThetaPhi_[plan.block];
      const auto& src = transpose ? plan.sph : plan.cyl;
      const auto& dst = transpose ? plan.cyl : plan.sph;
      const int n = static_cast<int>(src.size());
      ws.gather.resize(n);
      ws.scatter.resize(n);
      for (int q = 0; q < n; ++q) ws.gather[q] = in[src[q]];
      Eigen::Map<const Vector> x(ws.gather.data(), n);
      Eigen::Map<Vector> y(ws.scatter.data(), n);
      if (transpose)
        y.noalias() = B.transpose() * x;
      else
        y.noalias() = B * x;
      for (int q = 0; q < n; ++q) out[dst[q]] = ws.scatter[q];
    }
  }

  int N_;
  int K_;
  BasisIndexMaps maps_;
  QuadratureRule coarse_, fine_;
  LagrangeBasis lagrange_;
  Matrix P_LH_;
  std::vector<Matrix> P_HTheta_;
  std::vector<Matrix> P_ThetaPhi_;
  std::vector<int> hermite_cube_;
  std::vector<BlockPlan> plans_;
};

}  // namespace boltzmann
