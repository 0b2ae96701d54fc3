#pragma once

/**
 * @file dynamics.hpp
 * @brief Initial data, velocity moments, RK4 time stepping and error norms for the
 *        space-homogeneous Boltzmann equation in the nodal trial basis.
 */

#include "collision.hpp"
#include "specfun.hpp"
#include "tensor.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace boltzmann {

using Velocity = std::array<double, 3>;
using DensityFunction = std::function<double(const Velocity&)>;

// ---------------------------------------------------------------------------
// BKW solution for Maxwell molecules with b_theta = 1/(4 pi)

/// K(t) = 1 - e^{-t/6}
inline double bkw_K(double t) { return 1.0 - std::exp(-t / 6.0); }

/// f_BKW(t) >= 0 everywhere iff t > 6 ln(5/2).
inline double bkw_threshold() { return 6.0 * std::log(2.5); }

/**
 * @brief f(t, v) = 1/(2 (2 pi K)^{3/2}) ((5K - 3)/K + (1 - K)/K^2 |v|^2) e^{-|v|^2/(2K)}.
 *
 * Below the nonnegativity threshold a warning is printed once; the value is still returned.
 */
inline double bkw_eval(double t, const Velocity& v)
{
  if (t <= bkw_threshold()) {
    static std::atomic<bool> warned{false};
    if (!warned.exchange(true))
      std::clog << "warning: BKW solution evaluated at t = " << t << " <= 6 ln(5/2); it is negative somewhere\n";
  }
  const double K = bkw_K(t);
  const double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  const double pre = 1.0 / (2.0 * std::pow(2.0 * std::numbers::pi * K, 1.5));
  return pre * ((5.0 * K - 3.0) / K + (1.0 - K) / (K * K) * v2) * std::exp(-v2 / (2.0 * K));
}

// ---------------------------------------------------------------------------
// Maxwellians

struct MaxwellianPeak
{
  double rho = 1.0;
  Velocity V{0.0, 0.0, 0.0};
  double T = 1.0;
};

/// rho / (2 pi T)^{3/2} e^{-|v - V|^2 / (2T)}
inline double maxwellian(const MaxwellianPeak& m, const Velocity& v)
{
  const double d0 = v[0] - m.V[0], d1 = v[1] - m.V[1], d2 = v[2] - m.V[2];
  return m.rho / std::pow(2.0 * std::numbers::pi * m.T, 1.5) * std::exp(-(d0 * d0 + d1 * d1 + d2 * d2) / (2.0 * m.T));
}

/// Two unit-temperature peaks with total rho = 1, V = (0, 1, 0), T = 8/3.
inline std::array<MaxwellianPeak, 2> two_peaks_initial()
{
  return {MaxwellianPeak{0.5, {-2.0, 2.0, 0.0}, 1.0}, MaxwellianPeak{0.5, {2.0, 0.0, 0.0}, 1.0}};
}

inline DensityFunction two_peaks_density()
{
  return [peaks = two_peaks_initial()](const Velocity& v) { return maxwellian(peaks[0], v) + maxwellian(peaks[1], v); };
}

/// Trial-space temperature parameter for a physical temperature T.
inline double trial_Tbar(double T_physical) { return 2.0 * T_physical; }

// ---------------------------------------------------------------------------
// Projection and moments

/// v_j = sqrt(Tbar) x_j + Vbar on the (N+1)^3 tensor Gauss-Hermite nodes, axis 0 fastest.
inline std::vector<Velocity> physical_nodes(const QuadratureRule& rule, double Tbar, const Velocity& Vbar)
{
  const int n = rule.order();
  const double s = std::sqrt(Tbar);
  std::vector<Velocity> v(n * n * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        v[i + n * (j + n * k)] = {s * rule.nodes[i] + Vbar[0], s * rule.nodes[j] + Vbar[1], s * rule.nodes[k] + Vbar[2]};
  return v;
}

enum class Projection { galerkin, collocation };

/**
 * @brief Initial coefficients for f in V_{Tbar, Vbar, N}.
 *
 * galerkin:    c_n = int f(v) L_n(x) dv / (w_n Tbar^{3/2}), tested like the collision
 *              integrals, so every moment in the test space is reproduced. The integral
 *              uses a `quad_points`-point Gauss-Hermite rule per axis (0: max(4N + 8, 64)).
 * collocation: c_j = e^{|x_j|^2} f(sqrt(Tbar) x_j + Vbar) on the trial nodes.
 */
inline SpectralDensity project_initial(const DensityFunction& f, int N, double Tbar, const Velocity& Vbar,
                                       Projection kind = Projection::galerkin, int quad_points = 0)
{
  if (N < 0) throw std::invalid_argument("project_initial: N must be >= 0");
  if (!(Tbar > 0)) throw std::invalid_argument("project_initial: Tbar must be > 0");
  SpectralDensity d(N, Tbar, Vbar);
  const auto coarse = gauss_hermite(N + 1);
  const auto rule = kind == Projection::collocation ? coarse
                                                    : gauss_hermite(quad_points > 0 ? quad_points : std::max(4 * N + 8, 64));
  const auto v = physical_nodes(rule, Tbar, Vbar);
  const int n = rule.order();
  std::vector<double> samples(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    samples[j] = f(v[j]);
    if (!std::isfinite(samples[j])) throw std::domain_error("project_initial: non-finite sample of the initial density");
  }
  // per-axis factor: e^{x^2} for collocation, W_j e^{x_j^2} l_n(x_j) / w_n for the Galerkin projection
  Matrix A = Matrix::Zero(N + 1, n);
  if (kind == Projection::collocation) {
    for (int i = 0; i < n; ++i) A(i, i) = std::exp(rule.nodes[i] * rule.nodes[i]);
  } else {
    const auto lag = LagrangeBasis::on_hermite_nodes(N);
    for (int j = 0; j < n; ++j) {
      const auto l = lag.eval_all(rule.nodes[j]);
      const double g = rule.weights[j] * std::exp(rule.nodes[j] * rule.nodes[j]);
      for (int i = 0; i <= N; ++i) A(i, j) = g * l[i] / coarse.weights[i];
    }
  }
  d.c = apply_axes(A, A, A, samples);
  return d;
}

struct MomentSet
{
  double t = 0;
  double rho = 0;
  Velocity V{0.0, 0.0, 0.0};
  double E = 0;
  double T = 0;
  std::array<std::array<double, 3>, 3> P{};
  Velocity q{0.0, 0.0, 0.0};
};

/**
 * @brief rho, V, E = int |v|^2 f / 2, T = (2E/rho - |V|^2)/3, P_ij = int v_i v_j f,
 *        q_i = int v_i |v|^2 f / 2.
 *
 * Uses the native (N+1)-point rule: the integrands have per-axis degree <= N + 3 <= 2N + 1
 * against the Gaussian weight, so the quadrature is exact for N >= 2.
 */
inline MomentSet compute_moments(const SpectralDensity& f, double t = 0.0)
{
  const auto rule = gauss_hermite(f.N + 1);
  const auto v = physical_nodes(rule, f.Tbar, f.Vbar);
  const auto w = nodal_weights(rule);
  const double jac = std::pow(f.Tbar, 1.5);
  MomentSet m;
  m.t = t;
  double mom[3] = {0, 0, 0}, energy2 = 0;
  for (std::size_t n = 0; n < v.size(); ++n) {
    const double a = w[n] * jac * f.c[n];
    const auto& u = v[n];
    const double u2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    m.rho += a;
    for (int i = 0; i < 3; ++i) {
      mom[i] += a * u[i];
      m.q[i] += 0.5 * a * u[i] * u2;
      for (int j = i; j < 3; ++j) m.P[i][j] += a * u[i] * u[j];
    }
    energy2 += a * u2;
  }
  for (int i = 0; i < 3; ++i) {
    m.V[i] = mom[i] / m.rho;
    for (int j = 0; j < i; ++j) m.P[i][j] = m.P[j][i];
  }
  m.E = 0.5 * energy2;
  const double V2 = m.V[0] * m.V[0] + m.V[1] * m.V[1] + m.V[2] * m.V[2];
  m.T = (2.0 * m.E / m.rho - V2) / 3.0;
  return m;
}

/// Closed-form P and q for the two-peak initial data under Maxwell molecules with b = 1/(4 pi).
inline MomentSet analytic_moments_maxwell(double t)
{
  if (t < 0) throw std::invalid_argument("analytic_moments_maxwell: t must be >= 0");
  const double e = std::exp(-t / 2.0);
  MomentSet m;
  m.t = t;
  m.rho = 1.0;
  m.V = {0.0, 1.0, 0.0};
  m.T = 8.0 / 3.0;
  m.E = 4.5;
  m.P[0][0] = 7.0 / 3.0 * e + 8.0 / 3.0;
  m.P[1][1] = -2.0 / 3.0 * e + 11.0 / 3.0;
  m.P[2][2] = -5.0 / 3.0 * e + 8.0 / 3.0;
  m.P[0][1] = m.P[1][0] = -2.0 * e;
  m.q[0] = -2.0 * e;
  m.q[1] = -2.0 / 3.0 * e + 43.0 / 6.0;
  return m;
}

/// The moment columns compared in trajectory studies: P11, P22, P33, P12, q1, q2.
inline std::array<double, 6> compared_moments(const MomentSet& m)
{
  return {m.P[0][0], m.P[1][1], m.P[2][2], m.P[0][1], m.q[0], m.q[1]};
}

// ---------------------------------------------------------------------------
// Time stepping

class NumericalError : public std::runtime_error
{
 public:
  NumericalError(const std::string& what, double t, long step)
      : std::runtime_error(what + " at t = " + std::to_string(t) + ", step " + std::to_string(step))
      , t_(t)
      , step_(step)
  {
  }
  double time() const { return t_; }
  long step() const { return step_; }

 private:
  double t_;
  long step_;
};

/// Called after the initial state (step 0) and after every step.
using StepCallback = std::function<void(long step, double t, const SpectralDensity& f, const MomentSet& m)>;

struct Trajectory
{
  std::vector<MomentSet> moments;
  SpectralDensity final_state;
};

/// dc/dt for the nodal state.
inline std::vector<double> collision_rhs(const CollisionOperator& op, const SpectralDensity& f)
{
  return galerkin_rhs(op.evaluate(f), op.transforms(), f.Tbar);
}

/**
 * @brief Classical RK4 on dc/dt = M^{-1} q(c); round((t_end - t0)/dt) steps of size dt.
 *
 * Throws NumericalError if a stage or the state becomes non-finite.
 */
inline Trajectory rk4_integrate(const SpectralDensity& f0, const CollisionOperator& op, double dt, double t0,
                                double t_end, const StepCallback& callback = {})
{
  if (!(dt > 0)) throw std::invalid_argument("rk4_integrate: dt must be > 0");
  if (!(t_end > t0)) throw std::invalid_argument("rk4_integrate: t_end must be > t0");
  const long steps = std::lround((t_end - t0) / dt);
  const std::size_t dim = f0.c.size();
  Trajectory traj;
  SpectralDensity f = f0;
  SpectralDensity stage = f0;
  auto record = [&](long step, double t) {
    traj.moments.push_back(compute_moments(f, t));
    if (callback) callback(step, t, f, traj.moments.back());
  };
  auto check = [&](const std::vector<double>& x, double t, long step) {
    for (double v : x)
      if (!std::isfinite(v)) throw NumericalError("non-finite value in RK4 stage", t, step);
  };
  record(0, t0);
  for (long s = 0; s < steps; ++s) {
    const double t = t0 + s * dt;
    const auto k1 = collision_rhs(op, f);
    check(k1, t, s + 1);
    for (std::size_t n = 0; n < dim; ++n) stage.c[n] = f.c[n] + 0.5 * dt * k1[n];
    const auto k2 = collision_rhs(op, stage);
    check(k2, t, s + 1);
    for (std::size_t n = 0; n < dim; ++n) stage.c[n] = f.c[n] + 0.5 * dt * k2[n];
    const auto k3 = collision_rhs(op, stage);
    check(k3, t, s + 1);
    for (std::size_t n = 0; n < dim; ++n) stage.c[n] = f.c[n] + dt * k3[n];
    const auto k4 = collision_rhs(op, stage);
    check(k4, t, s + 1);
    for (std::size_t n = 0; n < dim; ++n) f.c[n] += dt / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
    check(f.c, t + dt, s + 1);
    record(s + 1, t0 + (s + 1) * dt);
  }
  traj.final_state = std::move(f);
  return traj;
}

// ---------------------------------------------------------------------------
// Error norms

struct ErrorNorms
{
  double L2 = 0;
  double Linf = 0;
};

/**
 * @brief Pointwise errors on the (2N+1)^3 Gauss-Hermite lattice mapped to the physical
 *        frame. L_inf is the lattice maximum; L2 uses the lattice quadrature
 *        int g^2 dv ~ Tbar^{3/2} sum_j w_j e^{|x_j|^2} g(v_j)^2.
 */
inline ErrorNorms error_norms(const SpectralDensity& f, const DensityFunction& reference)
{
  const int n = 2 * f.N + 1;
  const auto fine = gauss_hermite(n);
  const auto lag = LagrangeBasis::on_hermite_nodes(f.N);
  Matrix E(n, f.N + 1);
  for (int j = 0; j < n; ++j) {
    const auto l = lag.eval_all(fine.nodes[j]);
    for (int i = 0; i <= f.N; ++i) E(j, i) = l[i];
  }
  const auto p = apply_axes(E, E, E, f.c);
  const auto v = physical_nodes(fine, f.Tbar, f.Vbar);
  const double jac = std::pow(f.Tbar, 1.5);
  ErrorNorms out;
  double l2 = 0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int idx = i + n * (j + n * k);
        const double x2 = fine.nodes[i] * fine.nodes[i] + fine.nodes[j] * fine.nodes[j] + fine.nodes[k] * fine.nodes[k];
        const double ref = reference(v[idx]);
        if (!std::isfinite(ref)) throw std::domain_error("error_norms: non-finite reference value");
        const double g = std::exp(-x2) * p[idx] - ref;
        out.Linf = std::max(out.Linf, std::abs(g));
        l2 += fine.weights[i] * fine.weights[j] * fine.weights[k] * std::exp(x2) * g * g;
      }
  out.L2 = std::sqrt(jac * l2);
  return out;
}

// ---------------------------------------------------------------------------
// Experiment configuration

enum class InitialCondition { bkw, two_maxwellians };

struct ExperimentConfig
{
  std::string kernel = "maxwell";
  int N = 8;
  int n_ip = 8;
  double dt = 0.1;
  double t0 = 0.0;
  double t_end = 12.0;
  InitialCondition initial = InitialCondition::two_maxwellians;
  double Tbar = 16.0 / 3.0;
  Velocity Vbar{0.0, 1.0, 0.0};
  Truncation truncation = Truncation::degree_N;
  Projection projection = Projection::galerkin;
  std::string output;

  void validate() const
  {
    if (N < 2) throw std::invalid_argument("N must be >= 2");
    if (n_ip < 1) throw std::invalid_argument("nip must be >= 1");
    if (!(dt > 0)) throw std::invalid_argument("dt must be > 0");
    if (!(t_end > t0)) throw std::invalid_argument("tend must be > t0");
    if (!(Tbar > 0)) throw std::invalid_argument("Tbar must be > 0");
  }

  DensityFunction initial_density() const
  {
    if (initial == InitialCondition::bkw) {
      const double t = t0;
      return [t](const Velocity& v) { return bkw_eval(t, v); };
    }
    return two_peaks_density();
  }
};

}  // namespace boltzmann
