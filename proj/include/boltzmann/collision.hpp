#pragma once

/**
 * @file collision.hpp
 * @brief Tested collision integrals q_n = int Q(f)(v) L_n((v - Vbar)/sqrt(Tbar)) dv.
 *
 * With f(v) = e^{-|x|^2} p(x), x = (v - Vbar)/sqrt(Tbar), and the substitution
 * v = vbar + vhat, w = vbar - vhat, y = sqrt(2) vhat, ybar = sqrt(2) vbar
 * (Jacobian 8 * 2^{-3} = 1), the tested integral becomes
 *
 *   q_n = Tbar^{3+beta/2} 2^{beta/2} sum_ip w_ip J_n(ybar_ip / sqrt(2)),
 *   J_n(vbar) = int e^{-|y|^2} |y|^beta f2(y) A[phi_n](y) dy,
 *
 * with f2(y) = p(vbar + y/sqrt2) p(vbar - y/sqrt2), phi_n(y) = L_n(vbar + y/sqrt2)
 * and A the angular averaging operator, diagonal in the spherical Laguerre basis.
 * Per outer node: shift, pointwise product, Hermite projection (truncated at
 * total degree K), cylinder and spherical transforms, |y|^beta multiplication,
 * diagonal scaling, transposed transforms, and the transposed shift fused with
 * the transposed Lagrange->Hermite map.
 */

#include "bases.hpp"
#include "kernel.hpp"
#include "parallel.hpp"
#include "tensor.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace boltzmann {

/**
 * @brief f(v) = e^{-|x|^2} sum_j c_j L_j(x), x = (v - Vbar)/sqrt(Tbar).
 *
 * c is the (N+1)^3 nodal tensor, axis 0 fastest.
 */
struct SpectralDensity
{
  int N = 0;
  double Tbar = 1.0;
  std::array<double, 3> Vbar{0.0, 0.0, 0.0};
  std::vector<double> c;

  SpectralDensity() = default;
  SpectralDensity(int N_, double Tbar_, std::array<double, 3> Vbar_)
      : N(N_)
      , Tbar(Tbar_)
      , Vbar(Vbar_)
      , c(static_cast<std::size_t>((N_ + 1) * (N_ + 1) * (N_ + 1)), 0.0)
  {
  }

  int dim() const { return (N + 1) * (N + 1) * (N + 1); }
};

/// e_j = p(vbar + mu_j) p(vbar - mu_j), using that the reversed flat index reflects mu.
inline void compute_f2(std::span<const double> shifted, std::span<double> e)
{
  if (shifted.size() != e.size()) throw std::invalid_argument("compute_f2: dimension mismatch");
  const std::size_t M = shifted.size();
  for (std::size_t j = 0; j < (M + 1) / 2; ++j) {
    const double v = shifted[j] * shifted[M - 1 - j];
    e[j] = v;
    e[M - 1 - j] = v;
  }
}

/// Per-worker scratch, sized once and reused across outer nodes.
struct CollisionWorkspace
{
  TransformWorkspace transform;
  std::vector<double> shifted, e, h, theta, phi, out, radial;

  explicit CollisionWorkspace(const TransformSet& T)
      : shifted(T.fine_dim())
      , e(T.fine_dim())
      , h(T.hier_dim())
      , theta(T.hier_dim())
      , phi(T.hier_dim())
      , out(T.nodal_dim())
  {
  }

  std::size_t storage_doubles() const
  {
    return shifted.size() + e.size() + h.size() + theta.size() + phi.size() + out.size() + radial.capacity() +
           transform.cube.capacity() + transform.tensor.a.capacity() + transform.tensor.b.capacity() +
           transform.gather.capacity() + transform.scatter.capacity();
  }
};

/**
 * @brief The collision pipeline for fixed (transforms, kernel, n_ip).
 *
 * Immutable after construction; evaluate() may be called concurrently.
 */
class CollisionOperator
{
 public:
  CollisionOperator(std::shared_ptr<const TransformSet> transforms, const CollisionKernel& kernel, int n_ip,
                    int threads = default_thread_count())
      : T_(std::move(transforms))
      , kernel_(kernel)
      , tables_(kernel, T_->maps())
      , n_ip_(n_ip)
      , threads_(std::max(1, threads))
  {
    if (n_ip < 1) throw std::invalid_argument("CollisionOperator: n_ip must be >= 1");
    outer_ = gauss_hermite(n_ip);
    const Matrix& PLH = T_->lagrange_to_hermite();
    for (int i = 0; i < n_ip; ++i) {
      Matrix S = T_->shift_1d(outer_.nodes[i] / std::numbers::sqrt2);
      backward_.push_back((PLH * S).transpose());
      shift_.push_back(std::move(S));
    }
  }

  const TransformSet& transforms() const { return *T_; }
  const CollisionKernel& kernel() const { return kernel_; }
  const KernelTables& tables() const { return tables_; }
  int n_ip() const { return n_ip_; }
  int threads() const { return threads_; }
  int N() const { return T_->N(); }

  /// q_n for all (N+1)^3 nodal test functions.
  std::vector<double> evaluate(const SpectralDensity& f) const
  {
    validate(f);
    const int n_nodes = n_ip_ * n_ip_ * n_ip_;
    const int dim = T_->nodal_dim();
    const int workers = effective_workers(n_nodes, threads_);
    std::vector<std::vector<double>> partial(workers, std::vector<double>(dim, 0.0));
    parallel_chunks(n_nodes, workers, [&](int w, int begin, int end) {
      CollisionWorkspace ws(*T_);
      for (int node = begin; node < end; ++node) {
        const int i0 = node % n_ip_, i1 = (node / n_ip_) % n_ip_, i2 = node / (n_ip_ * n_ip_);
        const double weight = outer_.weights[i0] * outer_.weights[i1] * outer_.weights[i2];
        node_contribution(f.c, {i0, i1, i2}, ws);
        for (int n = 0; n < dim; ++n) partial[w][n] += weight * ws.out[n];
      }
    });
    std::vector<double> q(dim, 0.0);
    for (const auto& p : partial)
      for (int n = 0; n < dim; ++n) q[n] += p[n];
    const double scale = kernel_.frame_prefactor(f.Tbar) * kernel_.radial_scale();
    for (auto& v : q) v *= scale;
    return q;
  }

  /**
   * @brief Unscaled J_n at the outer node with per-axis indices `idx` (no weight, no
   *        frame or radial constants); result in ws.out.
   */
  void node_contribution(std::span<const double> c, std::array<int, 3> idx, CollisionWorkspace& ws) const
  {
    const TransformSet& T = *T_;
    apply_axes(shift_[idx[0]], shift_[idx[1]], shift_[idx[2]], c.data(), ws.shifted.data(), ws.transform.tensor);
    compute_f2(ws.shifted, ws.e);
    T.nodal_to_hermite(ws.e, ws.h, ws.transform);
    T.hermite_to_cylinder(ws.h, ws.theta);
    T.cylinder_to_spherical(ws.theta, ws.phi, ws.transform);
    tables_.apply_radial(ws.phi, ws.radial);
    tables_.apply_inner_operator(ws.phi);
    T.spherical_to_cylinder(ws.phi, ws.theta, ws.transform);
    T.cylinder_to_hermite(ws.theta, ws.h);
    T.scatter_to_cube(ws.h, ws.transform);
    apply_axes(backward_[idx[0]], backward_[idx[1]], backward_[idx[2]], ws.transform.cube.data(), ws.out.data(),
               ws.transform.tensor);
  }

  const QuadratureRule& outer_rule() const { return outer_; }

  /// Doubles held by transforms, kernel tables, outer shift caches and one workspace.
  std::size_t storage_doubles() const
  {
    std::size_t n = T_->storage_doubles() + tables_.storage_doubles();
    for (const auto& S : shift_) n += S.size();
    for (const auto& B : backward_) n += B.size();
    CollisionWorkspace ws(*T_);
    std::vector<double> c(T_->nodal_dim(), 1.0);
    node_contribution(c, {0, 0, 0}, ws);
    return n + ws.storage_doubles();
  }

 private:
  void validate(const SpectralDensity& f) const
  {
    if (f.N != T_->N() || f.dim() != T_->nodal_dim() || static_cast<int>(f.c.size()) != f.dim())
      throw std::invalid_argument("evaluate_collision: density does not match the transform degree");
    if (!(f.Tbar > 0)) throw std::invalid_argument("evaluate_collision: Tbar must be > 0");
    for (double v : f.c)
      if (!std::isfinite(v)) throw std::domain_error("evaluate_collision: non-finite coefficient");
  }

  std::shared_ptr<const TransformSet> T_;
  CollisionKernel kernel_;
  KernelTables tables_;
  int n_ip_;
  int threads_;
  QuadratureRule outer_;
  std::vector<Matrix> shift_;     // (2N+1) x (N+1) per outer node value
  std::vector<Matrix> backward_;  // (N+1) x (K+1): (P_LH S)^T
};

/// One-shot evaluation; builds the operator for this call.
inline std::vector<double> evaluate_collision(const SpectralDensity& f, const CollisionKernel& kernel,
                                              std::shared_ptr<const TransformSet> transforms, int n_ip,
                                              int threads = default_thread_count())
{
  return CollisionOperator(std::move(transforms), kernel, n_ip, threads).evaluate(f);
}

/// Product weights w_n of the (N+1)^3 tensor Gauss-Hermite rule, axis 0 fastest.
inline std::vector<double> nodal_weights(const QuadratureRule& rule)
{
  const int n = rule.order();
  std::vector<double> w(n * n * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) w[i + n * (j + n * k)] = rule.weights[i] * rule.weights[j] * rule.weights[k];
  return w;
}

/// dc_n/dt = q_n / (w_n Tbar^{3/2}): the diagonal mass matrix of the nodal trial basis.
inline std::vector<double> galerkin_rhs(std::span<const double> q, const TransformSet& T, double Tbar)
{
  if (static_cast<int>(q.size()) != T.nodal_dim()) throw std::invalid_argument("galerkin_rhs: dimension mismatch");
  const auto w = nodal_weights(T.coarse_rule());
  const double jac = std::pow(Tbar, 1.5);
  std::vector<double> dc(q.size());
  for (std::size_t n = 0; n < q.size(); ++n) dc[n] = q[n] / (w[n] * jac);
  return dc;
}

/**
 * @brief Tests against the orthonormal Hermite polynomials of total degree <= N in the
 *        scaled frame: qH_h = sum_n H_h(x_n) q_n (exact since H_h lies in the nodal span).
 */
inline std::vector<double> hermite_tested(std::span<const double> q, const TransformSet& T)
{
  const int N = T.N(), n = N + 1;
  if (static_cast<int>(q.size()) != T.nodal_dim()) throw std::invalid_argument("hermite_tested: dimension mismatch");
  Matrix H(n, n);  // H(a, i) = h_a(x_i)
  for (int i = 0; i < n; ++i) {
    const auto h = eval_hermite_all(N, T.coarse_rule().nodes[i]);
    for (int a = 0; a < n; ++a) H(a, i) = h[a];
  }
  const auto cube = apply_axes(H, H, H, std::vector<double>(q.begin(), q.end()));
  std::vector<double> out(hierarchical_dim(N));
  for (int k = 0; k <= N; ++k)
    for (int i = 0; i <= k; ++i)
      for (int a = 0; a <= i; ++a) out[BasisIndexMaps::hermite_index(k, i, a)] = cube[a + n * ((i - a) + n * (k - i))];
  return out;
}

/// sum_n phi(x_n) q_n for a test function phi of the scaled velocity x.
template <class Fn>
double tested_against(std::span<const double> q, const QuadratureRule& coarse, Fn&& phi)
{
  const int n = coarse.order();
  double s = 0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        s += phi(coarse.nodes[i], coarse.nodes[j], coarse.nodes[k]) * q[i + n * (j + n * k)];
  return s;
}

}  // namespace boltzmann
