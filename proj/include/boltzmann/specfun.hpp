#pragma once

/**
 * @file specfun.hpp
 * @brief Gauss rules and the orthonormal polynomial families used by the
 *        collision pipeline.
 *
 * Conventions
 *  - Hermite weight is e^{-v^2} on R (physicists' weight); every scaling by
 *    sqrt(2) or sqrt(Tbar) is applied to arguments.
 *  - All polynomial families are orthonormal w.r.t. their weight and are
 *    evaluated by three-term recurrences (no factorials).
 *  - Associated Legendre functions carry no Condon-Shortley phase.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace boltzmann {

enum class RuleKind { hermite, generalized_laguerre, legendre, generalized_hermite };

/// 1D Gauss rule. For generalized_laguerre `alpha` is the exponent of x^alpha,
/// for generalized_hermite it is the exponent of |x|^alpha.
struct QuadratureRule
{
  std::vector<double> nodes;
  std::vector<double> weights;
  RuleKind kind = RuleKind::hermite;
  double alpha = 0;

  int order() const { return static_cast<int>(nodes.size()); }

  template <class F>
  double integrate(F&& f) const
  {
    double s = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
};

namespace detail {

/// Orthonormal recurrence  x p_k = b_{k+1} p_{k+1} + a_k p_k + b_k p_{k-1}.
struct Recurrence
{
  std::vector<double> a;  // a_0 .. a_{n}
  std::vector<double> b;  // b_0 (unused) .. b_{n+1}
  double p0 = 1;          // value of the constant orthonormal polynomial
};

inline Recurrence hermite_recurrence(int n)
{
  Recurrence r;
  r.a.assign(n + 1, 0.0);
  r.b.resize(n + 2);
  for (int k = 0; k < n + 2; ++k) r.b[k] = std::sqrt(0.5 * k);
  r.p0 = std::pow(std::numbers::pi, -0.25);
  return r;
}

inline Recurrence laguerre_recurrence(int n, double alpha)
{
  Recurrence r;
  r.a.resize(n + 1);
  r.b.resize(n + 2);
  for (int k = 0; k < n + 1; ++k) r.a[k] = 2.0 * k + 1.0 + alpha;
  // negative off-diagonal keeps L_k(0) > 0
  for (int k = 0; k < n + 2; ++k) r.b[k] = -std::sqrt(k * (k + alpha));
  r.p0 = 1.0 / std::sqrt(std::tgamma(alpha + 1.0));
  return r;
}

inline Recurrence legendre_recurrence(int n)
{
  Recurrence r;
  r.a.assign(n + 1, 0.0);
  r.b.resize(n + 2);
  r.b[0] = 0;
  for (int k = 1; k < n + 2; ++k) r.b[k] = k / std::sqrt(4.0 * k * k - 1.0);
  r.p0 = std::sqrt(0.5);
  return r;
}

/// weight |x|^{2 mu} e^{-x^2}
inline Recurrence generalized_hermite_recurrence(int n, double mu)
{
  Recurrence r;
  r.a.assign(n + 1, 0.0);
  r.b.resize(n + 2);
  r.b[0] = 0;
  for (int k = 1; k < n + 2; ++k) r.b[k] = std::sqrt(0.5 * (k + ((k % 2) ? 2.0 * mu : 0.0)));
  r.p0 = 1.0 / std::sqrt(std::tgamma(mu + 0.5));
  return r;
}

/// p_0(x) .. p_n(x) into out (size n+1)
inline void eval_recurrence(const Recurrence& r, int n, double x, std::span<double> out)
{
  out[0] = r.p0;
  if (n == 0) return;
  out[1] = (x - r.a[0]) * out[0] / r.b[1];
  for (int k = 1; k < n; ++k) out[k + 1] = ((x - r.a[k]) * out[k] - r.b[k] * out[k - 1]) / r.b[k + 1];
}

/// p_n(x) and p_n'(x)
inline std::array<double, 2> eval_with_derivative(const Recurrence& r, int n, double x)
{
  double pm = 0, p = r.p0, dpm = 0, dp = 0;
  for (int k = 0; k < n; ++k) {
    const double bk = (k == 0) ? 0.0 : r.b[k];
    const double pn = ((x - r.a[k]) * p - bk * pm) / r.b[k + 1];
    const double dpn = ((x - r.a[k]) * dp + p - bk * dpm) / r.b[k + 1];
    pm = p;
    p = pn;
    dpm = dp;
    dp = dpn;
  }
  return {p, dp};
}

/// Golub-Welsch nodes, Newton-polished against p_n, with Christoffel weights
/// w_j = 1 / sum_k p_k(x_j)^2 (relatively accurate even for tiny weights).
inline QuadratureRule rule_from_recurrence(const Recurrence& r, int n, RuleKind kind, double alpha)
{
  Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
  for (int k = 0; k < n; ++k) diag(k) = r.a[k];
  for (int k = 0; k + 1 < n; ++k) sub(k) = std::abs(r.b[k + 1]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub.head(std::max(n - 1, 0)), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("quadrature: eigensolver failed");

  QuadratureRule rule;
  rule.kind = kind;
  rule.alpha = alpha;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  std::vector<double> p(n);
  for (int j = 0; j < n; ++j) {
    double x = es.eigenvalues()(j);
    for (int it = 0; it < 3; ++it) {
      const auto [f, df] = eval_with_derivative(r, n, x);
      if (df == 0) break;
      const double dx = f / df;
      if (!(std::abs(dx) < 1e-6 * (1.0 + std::abs(x)))) break;
      x -= dx;
      if (std::abs(dx) <= 1e-17 * (1.0 + std::abs(x))) break;
    }
    eval_recurrence(r, n - 1, x, p);
    double s = 0;
    for (int k = 0; k < n; ++k) s += p[k] * p[k];
    rule.nodes[j] = x;
    rule.weights[j] = 1.0 / s;
  }
  return rule;
}

inline void symmetrize(QuadratureRule& rule)
{
  const int n = rule.order();
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[j] + rule.weights[i]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (n % 2) rule.nodes[n / 2] = 0.0;
}

inline void require_order(int n, const char* who)
{
  if (n < 1) throw std::invalid_argument(std::string(who) + ": order must be >= 1");
}

}  // namespace detail

/// n-point rule for e^{-v^2} on R.
inline QuadratureRule gauss_hermite(int n)
{
  detail::require_order(n, "gauss_hermite");
  auto rule = detail::rule_from_recurrence(detail::hermite_recurrence(n), n, RuleKind::hermite, 0);
  detail::symmetrize(rule);
  return rule;
}

/// n-point rule for e^{-x} x^alpha on (0, inf).
inline QuadratureRule gauss_laguerre(int n, double alpha)
{
  detail::require_order(n, "gauss_laguerre");
  if (!(alpha > -1.0)) throw std::invalid_argument("gauss_laguerre: alpha must be > -1");
  return detail::rule_from_recurrence(detail::laguerre_recurrence(n, alpha), n,
                                      RuleKind::generalized_laguerre, alpha);
}

/// n-point rule on [-1, 1] with unit weight.
inline QuadratureRule gauss_legendre(int n)
{
  detail::require_order(n, "gauss_legendre");
  auto rule = detail::rule_from_recurrence(detail::legendre_recurrence(n), n, RuleKind::legendre, 0);
  detail::symmetrize(rule);
  return rule;
}

/// n-point rule for |x|^{2 mu} e^{-x^2} on R (mu > -1/2).
inline QuadratureRule gauss_generalized_hermite(int n, double mu)
{
  detail::require_order(n, "gauss_generalized_hermite");
  if (!(mu > -0.5)) throw std::invalid_argument("gauss_generalized_hermite: mu must be > -1/2");
  auto rule = detail::rule_from_recurrence(detail::generalized_hermite_recurrence(n, mu), n,
                                           RuleKind::generalized_hermite, 2 * mu);
  detail::symmetrize(rule);
  return rule;
}

/// h_0(v) .. h_N(v), orthonormal w.r.t. e^{-v^2}.
inline void eval_hermite_all(int N, double v, std::span<double> out)
{
  const double h0 = std::pow(std::numbers::pi, -0.25);
  out[0] = h0;
  if (N == 0) return;
  out[1] = std::sqrt(2.0) * v * h0;
  for (int k = 1; k < N; ++k)
    out[k + 1] = std::sqrt(2.0 / (k + 1)) * v * out[k] - std::sqrt(double(k) / (k + 1)) * out[k - 1];
}

inline std::vector<double> eval_hermite_all(int N, double v)
{
  std::vector<double> out(N + 1);
  eval_hermite_all(N, v, out);
  return out;
}

/// L_0^alpha(x) .. L_K^alpha(x), orthonormal w.r.t. e^{-x} x^alpha on (0, inf).
inline void eval_assoc_laguerre_all(int K, double alpha, double x, std::span<double> out)
{
  if (x < 0) throw std::domain_error("eval_assoc_laguerre_all: x must be >= 0");
  if (!(alpha > -1.0)) throw std::invalid_argument("eval_assoc_laguerre_all: alpha must be > -1");
  out[0] = 1.0 / std::sqrt(std::tgamma(alpha + 1.0));
  if (K == 0) return;
  out[1] = (1.0 + alpha - x) / std::sqrt(1.0 + alpha) * out[0];
  for (int k = 1; k < K; ++k) {
    const double c1 = (2.0 * k + 1.0 + alpha - x) / std::sqrt((k + 1.0) * (k + 1.0 + alpha));
    const double c2 = std::sqrt(k * (k + alpha) / ((k + 1.0) * (k + 1.0 + alpha)));
    out[k + 1] = c1 * out[k] - c2 * out[k - 1];
  }
}

inline std::vector<double> eval_assoc_laguerre_all(int K, double alpha, double x)
{
  std::vector<double> out(K + 1);
  eval_assoc_laguerre_all(K, alpha, x, out);
  return out;
}

/// Legendre polynomials P_0(x) .. P_L(x) (unnormalized, P_l(1) = 1).
inline std::vector<double> eval_legendre_all(int L, double x)
{
  std::vector<double> p(L + 1);
  p[0] = 1;
  if (L > 0) p[1] = x;
  for (int l = 1; l < L; ++l) p[l + 1] = ((2 * l + 1) * x * p[l] - l * p[l - 1]) / (l + 1);
  return p;
}

/**
 * @brief Normalized associated Legendre functions
 *        Pbar_l^m(x) = sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_l^m(x), 0 <= m <= l <= L.
 *
 * Stored triangularly: index l(l+1)/2 + m. No Condon-Shortley phase.
 */
class NormalizedLegendre
{
 public:
  explicit NormalizedLegendre(int L)
      : L_(L)
      , values_((L + 1) * (L + 2) / 2)
  {
  }

  static int index(int l, int m) { return l * (l + 1) / 2 + m; }

  void evaluate(double x)
  {
    const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
    values_[0] = 0.5 / std::sqrt(std::numbers::pi);
    for (int m = 1; m <= L_; ++m)
      values_[index(m, m)] = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * values_[index(m - 1, m - 1)];
    for (int m = 0; m < L_; ++m) values_[index(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * values_[index(m, m)];
    for (int m = 0; m <= L_; ++m) {
      for (int l = m + 2; l <= L_; ++l) {
        const double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
        const double b = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) / (4.0 * (l - 1) * (l - 1) - 1.0));
        values_[index(l, m)] = a * (x * values_[index(l - 1, m)] - b * values_[index(l - 2, m)]);
      }
    }
  }

  double operator()(int l, int m) const { return values_[index(l, m)]; }
  int max_degree() const { return L_; }

 private:
  int L_;
  std::vector<double> values_;
};

enum class Trig { cos = 0, sin = 1 };

/// Position of Y_i^{j,t} in the output of eval_real_sph_harm:
/// per degree i the order is [j=0, (1,cos), (1,sin), (2,cos), ...].
inline int sph_harm_index(int i, int j, Trig t)
{
  return i * i + (j == 0 ? 0 : 2 * j - 1 + static_cast<int>(t));
}

/// All real spherical harmonics Y_i^{j,t}(theta, phi), i <= L, orthonormal on S^2.
inline std::vector<double> eval_real_sph_harm(int L, double theta, double phi)
{
  if (!(theta >= 0.0 && theta <= std::numbers::pi))
    throw std::domain_error("eval_real_sph_harm: theta must lie in [0, pi]");
  NormalizedLegendre P(L);
  P.evaluate(std::cos(theta));
  std::vector<double> y((L + 1) * (L + 1));
  for (int i = 0; i <= L; ++i) {
    y[sph_harm_index(i, 0, Trig::cos)] = P(i, 0);
    for (int j = 1; j <= i; ++j) {
      const double c = std::numbers::sqrt2 * P(i, j);
      y[sph_harm_index(i, j, Trig::cos)] = c * std::cos(j * phi);
      y[sph_harm_index(i, j, Trig::sin)] = c * std::sin(j * phi);
    }
  }
  return y;
}

/**
 * @brief Lagrange collocation polynomials on the (N+1)-point Gauss-Hermite nodes.
 *
 * Evaluated with the first barycentric form l_j(x) = ell(x) w_j / (x - x_j),
 * which stays accurate for the extrapolated arguments produced by shifts.
 */
class LagrangeBasis
{
 public:
  LagrangeBasis() = default;

  explicit LagrangeBasis(std::vector<double> nodes)
      : nodes_(std::move(nodes))
      , bary_(nodes_.size())
  {
    const int n = size();
    for (int j = 0; j < n; ++j) {
      double w = 1;
      for (int k = 0; k < n; ++k)
        if (k != j) w *= nodes_[j] - nodes_[k];
      bary_[j] = 1.0 / w;
    }
  }

  static LagrangeBasis on_hermite_nodes(int N) { return LagrangeBasis(gauss_hermite(N + 1).nodes); }

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }

  void eval_all(double x, std::span<double> out) const
  {
    const int n = size();
    double ell = 1;
    for (int k = 0; k < n; ++k) {
      const double d = x - nodes_[k];
      if (d == 0.0) {
        std::fill(out.begin(), out.begin() + n, 0.0);
        out[k] = 1.0;
        return;
      }
      ell *= d;
    }
    for (int j = 0; j < n; ++j) out[j] = ell * bary_[j] / (x - nodes_[j]);
  }

  std::vector<double> eval_all(double x) const
  {
    std::vector<double> out(size());
    eval_all(x, out);
    return out;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> bary_;
};

/// l_0(v/scale) .. l_N(v/scale) on the (N+1)-point Gauss-Hermite nodes.
inline std::vector<double> eval_lagrange_all(int N, double scale, double v)
{
  return LagrangeBasis::on_hermite_nodes(N).eval_all(v / scale);
}

}  // namespace boltzmann
