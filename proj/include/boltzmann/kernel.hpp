#pragma once

/**
 * @file kernel.hpp
 * @brief Collision kernels B = |v - w|^beta b_theta(cos theta), their Funk-Hecke
 *        eigenvalues, and the tables consumed by the inner operator.
 */

#include "bases.hpp"
#include "specfun.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace boltzmann {

enum class AngularLaw { constant, angular_power, custom };

/**
 * @brief Factorized kernel b_r(|v-w|) b_theta(mu), b_r(r) = r^beta, beta in [0, 1].
 *
 * constant:       b_theta = c
 * angular_power:  b_theta = c (1 + mu)^p
 * custom:         b_theta given as a function
 */
class CollisionKernel
{
 public:
  static constexpr double inv_4pi = 0.25 / std::numbers::pi;

  static CollisionKernel maxwell() { return constant(0.0, inv_4pi, "maxwell"); }
  static CollisionKernel hard_sphere() { return constant(1.0, inv_4pi, "hardsphere"); }
  static CollisionKernel vhs(double beta) { return constant(beta, inv_4pi, "vhs:beta=" + format(beta)); }

  static CollisionKernel constant(double beta, double c, std::string tag = {})
  {
    CollisionKernel k(beta, AngularLaw::constant, std::move(tag));
    k.c_ = c;
    k.fn_ = [c](double) { return c; };
    return k;
  }

  static CollisionKernel angular_power(double beta, double p, double c = inv_4pi)
  {
    if (!(p > -1.0)) throw std::invalid_argument("angular kernel: exponent p must be > -1");
    CollisionKernel k(beta, AngularLaw::angular_power,
                      "angular:beta=" + format(beta) + ",p=" + format(p) + ",c=" + format(c));
    k.c_ = c;
    k.p_ = p;
    k.fn_ = [c, p](double mu) { return c * std::pow(1.0 + mu, p); };
    return k;
  }

  static CollisionKernel custom(double beta, std::function<double(double)> b_theta, std::string tag = "custom")
  {
    CollisionKernel k(beta, AngularLaw::custom, std::move(tag));
    k.fn_ = std::move(b_theta);
    return k;
  }

  /**
   * @brief Kernel from a selection string:
   *        "maxwell", "hardsphere", "vhs:beta=<x>", "angular[:beta=<x>,p=<y>,c=<z>]".
   *        c accepts a number or "1/4pi" / "1/4π".
   */
  static CollisionKernel parse(const std::string& spec)
  {
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    std::map<std::string, std::string> kv;
    if (colon != std::string::npos) {
      std::string rest = spec.substr(colon + 1);
      std::size_t pos = 0;
      while (pos <= rest.size()) {
        const auto comma = rest.find(',', pos);
        const std::string item = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("kernel '" + spec + "': expected key=value");
        kv[item.substr(0, eq)] = item.substr(eq + 1);
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    }
    auto take = [&](const std::string& key, double fallback) {
      auto it = kv.find(key);
      if (it == kv.end()) return fallback;
      const double v = parse_number(it->second);
      kv.erase(it);
      return v;
    };
    CollisionKernel k = [&] {
      if (name == "maxwell") return maxwell();
      if (name == "hardsphere") return hard_sphere();
      if (name == "vhs") {
        if (!kv.count("beta")) throw std::invalid_argument("kernel 'vhs' requires beta=<x>");
        return vhs(take("beta", 0.0));
      }
      if (name == "angular") {
        const double beta = take("beta", 0.38);
        const double p = take("p", 0.4);
        const double c = take("c", inv_4pi);
        return angular_power(beta, p, c);
      }
      throw std::invalid_argument("unknown kernel '" + name + "'");
    }();
    if (!kv.empty()) throw std::invalid_argument("kernel '" + spec + "': unknown key '" + kv.begin()->first + "'");
    return k;
  }

  double beta() const { return beta_; }
  AngularLaw law() const { return law_; }
  const std::string& tag() const { return tag_; }
  double b_theta(double mu) const { return fn_(mu); }
  const std::function<double(double)>& b_theta_function() const { return fn_; }

  /// Scalar carried by the rescaling to the centred frame, Tbar^{3 + beta/2}.
  double frame_prefactor(double Tbar) const { return std::pow(Tbar, 3.0 + 0.5 * beta_); }
  /// |v - w|^beta = 2^{beta/2} |y|^beta in the scaled relative velocity y.
  double radial_scale() const { return std::pow(2.0, 0.5 * beta_); }

  /// lambda_l = 2 pi int b_theta(mu) P_l(mu) dmu for l = 0..L.
  std::vector<double> lambdas(int L) const;

 private:
  CollisionKernel(double beta, AngularLaw law, std::string tag)
      : beta_(beta)
      , law_(law)
      , tag_(std::move(tag))
  {
    if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("collision kernel: beta must lie in [0, 1]");
  }

  static std::string format(double x)
  {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
  }

  static double parse_number(const std::string& s)
  {
    if (s == "1/4pi" || s == "1/4π" || s == "1/(4pi)" || s == "1/(4π)") return inv_4pi;
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("cannot parse number '" + s + "'");
    }
    if (used != s.size()) throw std::invalid_argument("cannot parse number '" + s + "'");
    return v;
  }

  double beta_;
  AngularLaw law_;
  std::string tag_;
  double c_ = 0;
  double p_ = 0;
  std::function<double(double)> fn_;
};

/**
 * @brief lambda_l = 2 pi int_{-1}^{1} b(mu) P_l(mu) dmu, l = 0..L, by Gauss-Legendre.
 *
 * order <= 0 selects max(L + 8, 64).
 */
inline std::vector<double> funk_hecke_lambdas(const std::function<double(double)>& b, int L, int order = 0)
{
  if (L < 0) throw std::invalid_argument("funk_hecke_lambdas: L must be >= 0");
  if (order <= 0) order = std::max(L + 8, 64);
  const auto rule = gauss_legendre(order);
  std::vector<double> lambda(L + 1, 0.0);
  for (int q = 0; q < rule.order(); ++q) {
    const double w = 2 * std::numbers::pi * rule.weights[q] * b(rule.nodes[q]);
    const auto P = eval_legendre_all(L, rule.nodes[q]);
    for (int l = 0; l <= L; ++l) lambda[l] += w * P[l];
  }
  return lambda;
}

/// funk_hecke_lambdas with the order doubled until successive results agree to tol.
inline std::vector<double> funk_hecke_lambdas_converged(const std::function<double(double)>& b, int L,
                                                        double tol = 1e-12, int max_order = 4096)
{
  int order = std::max(L + 8, 64);
  auto prev = funk_hecke_lambdas(b, L, order);
  while (2 * order <= max_order) {
    order *= 2;
    auto next = funk_hecke_lambdas(b, L, order);
    double diff = 0;
    for (int l = 0; l <= L; ++l) diff = std::max(diff, std::abs(next[l] - prev[l]));
    prev = std::move(next);
    if (diff < tol) break;
  }
  return prev;
}

inline std::vector<double> CollisionKernel::lambdas(int L) const
{
  std::vector<double> lambda(L + 1, 0.0);
  switch (law_) {
    case AngularLaw::constant:
      lambda[0] = 4 * std::numbers::pi * c_;
      break;
    case AngularLaw::angular_power:
      // int_{-1}^{1} (1+mu)^p P_l = 2^{p+1} Gamma(p+1)^2 / (Gamma(p+l+2) Gamma(p+1-l)),
      // evaluated through the ratio lambda_{l+1} / lambda_l = (p - l) / (p + l + 2).
      lambda[0] = 2 * std::numbers::pi * c_ * std::pow(2.0, p_ + 1) / (p_ + 1);
      for (int l = 0; l < L; ++l) lambda[l + 1] = lambda[l] * (p_ - l) / (p_ + l + 2);
      break;
    case AngularLaw::custom:
      lambda = funk_hecke_lambdas_converged(fn_, L);
      break;
  }
  return lambda;
}

/**
 * @brief R^{(l)}_{n', n} = int e^{-s} s^{l + 1/2 + beta/2} L_n^{l+1/2}(s) L_{n'}^{l+1/2}(s) ds,
 *        n, n' = 0..(K - l)/2: the |y|^beta multiplication on the radial chain of angular degree l.
 */
inline Matrix build_radial_mult(double beta, int l, int K)
{
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("build_radial_mult: beta must lie in [0, 1]");
  const int n = (K - l) / 2 + 1;
  if (beta == 0.0) return Matrix::Identity(n, n);
  const double alpha = l + 0.5;
  const auto rule = gauss_laguerre(n + 1, alpha + 0.5 * beta);
  Matrix R = Matrix::Zero(n, n);
  for (int q = 0; q < rule.order(); ++q) {
    const auto L = eval_assoc_laguerre_all(n - 1, alpha, rule.nodes[q]);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) R(a, b) += rule.weights[q] * L[a] * L[b];
  }
  return R;
}

/**
 * @brief Kernel data tabulated on the spherical index set of degree K:
 *        inner-operator eigenvalues d = lambda_l - lambda_0 and radial matrices.
 */
class KernelTables
{
 public:
  KernelTables(const CollisionKernel& kernel, const BasisIndexMaps& maps)
      : beta_(kernel.beta())
      , K_(maps.degree())
  {
    lambda_ = kernel.lambdas(K_ + 1);
    d_.reserve(maps.spherical().size());
    for (const auto& s : maps.spherical()) d_.push_back(lambda_[s.l] - lambda_[0]);
    for (int l = 0; l <= K_; ++l) {
      radial_.push_back(build_radial_mult(beta_, l, K_));
      std::vector<int> idx;
      for (int k = l; k <= K_; k += 2) {
        for (int m = 0; m <= l; ++m) idx.push_back(BasisIndexMaps::spherical_index(k, l, m, Trig::cos));
        for (int m = 1; m <= l; ++m) idx.push_back(BasisIndexMaps::spherical_index(k, l, m, Trig::sin));
      }
      chains_.push_back(std::move(idx));
    }
  }

  double beta() const { return beta_; }
  int degree() const { return K_; }
  const std::vector<double>& lambdas() const { return lambda_; }
  const std::vector<double>& d_table() const { return d_; }
  const Matrix& radial_matrix(int l) const { return radial_.at(l); }

  /// phi <- |y|^beta phi projected onto degree <= K, per (l, m, t) chain.
  void apply_radial(std::span<double> phi, std::vector<double>& scratch) const
  {
    if (beta_ == 0.0) return;
    for (int l = 0; l <= K_; ++l) {
      const auto& R = radial_[l];
      const auto& idx = chains_[l];
      const Eigen::Index n = R.rows(), width = 2 * l + 1;
      scratch.resize(2 * n * width);
      Eigen::Map<Matrix> X(scratch.data(), width, n);
      Eigen::Map<Matrix> Y(scratch.data() + n * width, width, n);
      for (Eigen::Index q = 0; q < n * width; ++q) X.data()[q] = phi[idx[q]];
      Y.noalias() = X * R.transpose();
      for (Eigen::Index q = 0; q < n * width; ++q) phi[idx[q]] = Y.data()[q];
    }
  }

  /// Diagonal inner operator in the spherical basis.
  void apply_inner_operator(std::span<double> phi) const
  {
    if (phi.size() != d_.size()) throw std::invalid_argument("apply_inner_operator: dimension mismatch");
    for (std::size_t i = 0; i < d_.size(); ++i) phi[i] *= d_[i];
  }

  std::size_t storage_doubles() const
  {
    std::size_t n = d_.size() + lambda_.size();
    for (const auto& R : radial_) n += R.size();
    return n;
  }

 private:
  double beta_;
  int K_;
  std::vector<double> lambda_;
  std::vector<double> d_;
  std::vector<Matrix> radial_;
  std::vector<std::vector<int>> chains_;
};

}  // namespace boltzmann
