#pragma once

/**
 * @file experiments.hpp
 * @brief Trajectory runs, CSV I/O, timing and verification shared by the command
 *        line tool and the acceptance suite.
 */

#include "bases.hpp"
#include "collision.hpp"
#include "dynamics.hpp"
#include "kernel.hpp"
#include "oracle.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace boltzmann {

// ---------------------------------------------------------------------------
// CSV

/// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double x)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  if (res.ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

inline const std::vector<std::string>& moment_columns()
{
  static const std::vector<std::string> cols = {"t",   "rho", "Vx",  "Vy",  "Vz",  "E",   "T",  "P11",
                                                "P22", "P33", "P12", "P13", "P23", "q1",  "q2", "q3"};
  return cols;
}

inline std::vector<double> moment_row(const MomentSet& m)
{
  return {m.t,       m.rho,     m.V[0],    m.V[1],    m.V[2],    m.E,    m.T,    m.P[0][0],
          m.P[1][1], m.P[2][2], m.P[0][1], m.P[0][2], m.P[1][2], m.q[0], m.q[1], m.q[2]};
}

inline MomentSet moments_from_row(const std::vector<double>& r)
{
  if (r.size() < 16) throw std::invalid_argument("moments_from_row: expected 16 columns");
  MomentSet m;
  m.t = r[0];
  m.rho = r[1];
  m.V = {r[2], r[3], r[4]};
  m.E = r[5];
  m.T = r[6];
  m.P[0][0] = r[7];
  m.P[1][1] = r[8];
  m.P[2][2] = r[9];
  m.P[0][1] = m.P[1][0] = r[10];
  m.P[0][2] = m.P[2][0] = r[11];
  m.P[1][2] = m.P[2][1] = r[12];
  m.q = {r[13], r[14], r[15]};
  return m;
}

class CsvWriter
{
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> columns)
      : out_(out)
      , n_(columns.size())
  {
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
  }

  void row(const std::vector<double>& values)
  {
    if (values.size() != n_) throw std::invalid_argument("CsvWriter: row width does not match the header");
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
    out_ << '\n';
  }

 private:
  std::ostream& out_;
  std::size_t n_;
};

struct CsvTable
{
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const
  {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw std::invalid_argument("CSV has no column '" + name + "'");
    return static_cast<int>(it - columns.begin());
  }
};

inline CsvTable read_csv(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("'" + path + "' is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.columns.push_back(cell);
  }
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
        throw std::runtime_error("'" + path + "' line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != table.columns.size())
      throw std::runtime_error("'" + path + "' line " + std::to_string(lineno) + ": wrong number of columns");
    table.rows.push_back(std::move(row));
  }
  return table;
}

/// Moment trajectory stored in a CSV with the standard moment columns.
inline std::vector<MomentSet> read_moment_trajectory(const std::string& path)
{
  const auto table = read_csv(path);
  std::vector<int> idx;
  for (const auto& c : moment_columns()) idx.push_back(table.column(c));
  std::vector<MomentSet> out;
  for (const auto& r : table.rows) {
    std::vector<double> v;
    for (int i : idx) v.push_back(r[i]);
    out.push_back(moments_from_row(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trajectory runs

struct StepRecord
{
  MomentSet moments;
  std::optional<ErrorNorms> errors;
};

struct RunTimings
{
  double build_seconds = 0;
  double integrate_seconds = 0;
  double total_seconds = 0;
  double seconds_per_step = 0;
};

struct RunResult
{
  std::vector<StepRecord> steps;
  SpectralDensity final_state;
  RunTimings timings;
  double max_L2 = 0;
  double max_Linf = 0;
};

using RecordCallback = std::function<void(const StepRecord&)>;

inline double seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/**
 * @brief Projects the initial data, integrates with RK4 and records moments (and BKW
 *        errors when the initial condition is BKW) after every step.
 */
inline RunResult run_experiment(const ExperimentConfig& cfg, int threads, const RecordCallback& on_step = {},
                                std::shared_ptr<const TransformSet> transforms = nullptr)
{
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  if (!transforms || transforms->N() != cfg.N ||
      transforms->truncation_degree() != truncation_degree(cfg.N, cfg.truncation))
    transforms = std::make_shared<const TransformSet>(cfg.N, cfg.truncation);
  const auto kernel = CollisionKernel::parse(cfg.kernel);
  CollisionOperator op(transforms, kernel, cfg.n_ip, threads);
  const auto f0 = project_initial(cfg.initial_density(), cfg.N, cfg.Tbar, cfg.Vbar, cfg.projection);
  RunResult result;
  result.timings.build_seconds = seconds_since(start);

  const bool bkw = cfg.initial == InitialCondition::bkw;
  const auto integrate_start = std::chrono::steady_clock::now();
  auto traj = rk4_integrate(f0, op, cfg.dt, cfg.t0, cfg.t_end,
                            [&](long, double t, const SpectralDensity& f, const MomentSet& m) {
                              StepRecord rec{m, std::nullopt};
                              if (bkw) {
                                rec.errors = error_norms(f, [t](const Velocity& v) { return bkw_eval(t, v); });
                                result.max_L2 = std::max(result.max_L2, rec.errors->L2);
                                result.max_Linf = std::max(result.max_Linf, rec.errors->Linf);
                              }
                              result.steps.push_back(rec);
                              if (on_step) on_step(rec);
                            });
  result.timings.integrate_seconds = seconds_since(integrate_start);
  result.final_state = std::move(traj.final_state);
  result.timings.total_seconds = seconds_since(start);
  if (result.steps.size() > 1)
    result.timings.seconds_per_step = result.timings.integrate_seconds / static_cast<double>(result.steps.size() - 1);
  return result;
}

/// BKW defaults: Tbar = 2, Vbar = 0, N = 8, n_ip = N, dt = 0.1, t in [5.5, 8.5].
inline ExperimentConfig bkw_config(int N = 8, int n_ip = -1)
{
  ExperimentConfig c;
  c.kernel = "maxwell";
  c.N = N;
  c.n_ip = n_ip > 0 ? n_ip : N;
  c.dt = 0.1;
  c.t0 = 5.5;
  c.t_end = 8.5;
  c.initial = InitialCondition::bkw;
  c.Tbar = 2.0;
  c.Vbar = {0.0, 0.0, 0.0};
  return c;
}

/// Two-peak defaults per kernel: maxwell N=8, dt=0.1, t in [0,12]; others N=16, dt=0.01.
inline ExperimentConfig moments_config(const std::string& kernel)
{
  ExperimentConfig c;
  c.initial = InitialCondition::two_maxwellians;
  c.Tbar = trial_Tbar(8.0 / 3.0);
  c.Vbar = {0.0, 1.0, 0.0};
  c.t0 = 0.0;
  c.t_end = 12.0;
  if (kernel == "maxwell") {
    c.kernel = "maxwell";
    c.N = 8;
    c.dt = 0.1;
  } else if (kernel == "hardsphere") {
    c.kernel = "hardsphere";
    c.N = 16;
    c.dt = 0.01;
  } else if (kernel == "angular") {
    c.kernel = "angular:beta=0.38,p=0.4,c=1/4pi";
    c.N = 16;
    c.dt = 0.01;
  } else {
    c.kernel = kernel;
    c.N = 16;
    c.dt = 0.01;
  }
  c.n_ip = c.N;
  return c;
}

/// max over recorded times of |P11, P22, P33, P12, q1, q2 - closed form|.
inline double max_analytic_moment_error(const std::vector<StepRecord>& steps)
{
  double e = 0;
  for (const auto& s : steps) {
    const auto got = compared_moments(s.moments), want = compared_moments(analytic_moments_maxwell(s.moments.t));
    for (int i = 0; i < 6; ++i) e = std::max(e, std::abs(got[i] - want[i]));
  }
  return e;
}

/**
 * @brief max over common times of |P11, P22, P33, P12, q1, q2 - reference|; times are
 *        matched to within 1e-9. Throws if no time is shared.
 */
inline double max_reference_moment_error(const std::vector<MomentSet>& run, const std::vector<MomentSet>& reference)
{
  double e = 0;
  std::size_t matched = 0, r = 0;
  for (const auto& m : run) {
    while (r < reference.size() && reference[r].t < m.t - 1e-9) ++r;
    if (r == reference.size()) break;
    if (std::abs(reference[r].t - m.t) > 1e-9) continue;
    ++matched;
    const auto a = compared_moments(m), b = compared_moments(reference[r]);
    for (int i = 0; i < 6; ++i) e = std::max(e, std::abs(a[i] - b[i]));
  }
  if (matched == 0) throw std::invalid_argument("reference trajectory shares no time with the run");
  return e;
}

inline std::vector<MomentSet> moments_of(const std::vector<StepRecord>& steps)
{
  std::vector<MomentSet> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.moments);
  return out;
}

// ---------------------------------------------------------------------------
// Timing and storage

struct BenchPoint
{
  int N = 0;
  int threads = 1;
  double seconds = 0;
  std::size_t storage_doubles = 0;
};

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

/// Random positive density near the trial Maxwellian (seeded).
inline SpectralDensity random_density(int N, std::uint64_t seed, double amplitude = 0.4, double Tbar = 1.0,
                                      const Velocity& Vbar = {0.0, 0.0, 0.0})
{
  SpectralDensity f(N, Tbar, Vbar);
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (auto& c : f.c) c = 1.0 + amplitude * dist(gen);
  return f;
}

/**
 * @brief Wall time of one collision evaluation with n_ip = N (best of `repeats`), and
 *        the storage held by transforms, tables, shift caches and one workspace.
 */
inline BenchPoint bench_collision(int N, int threads, const std::string& kernel = "hardsphere", int repeats = 1)
{
  BenchPoint p;
  p.N = N;
  p.threads = threads;
  auto T = std::make_shared<const TransformSet>(N);
  CollisionOperator op(T, CollisionKernel::parse(kernel), N, threads);
  const auto f = random_density(N, 1);
  p.seconds = 1e300;
  for (int r = 0; r < std::max(1, repeats); ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto q = op.evaluate(f);
    p.seconds = std::min(p.seconds, seconds_since(t0));
    if (!std::isfinite(q[0])) throw std::runtime_error("bench_collision: non-finite result");
  }
  p.storage_doubles = op.storage_doubles();
  return p;
}

// ---------------------------------------------------------------------------
// Verification

struct CheckResult
{
  std::string name;
  bool pass = false;
  double value = 0;
  double tolerance = 0;
};

inline double max_abs(const std::vector<double>& v)
{
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
  if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: size mismatch");
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Largest relative residual of the tested moments {1, v, |v|^2} of q.
inline double conservation_residual(const std::vector<double>& q, const TransformSet& T)
{
  const auto& c = T.coarse_rule();
  const double scale = std::max(max_abs(q), 1e-300);
  double r = 0;
  r = std::max(r, std::abs(tested_against(q, c, [](double, double, double) { return 1.0; })));
  r = std::max(r, std::abs(tested_against(q, c, [](double x, double, double) { return x; })));
  r = std::max(r, std::abs(tested_against(q, c, [](double, double y, double) { return y; })));
  r = std::max(r, std::abs(tested_against(q, c, [](double, double, double z) { return z; })));
  r = std::max(r, std::abs(tested_against(q, c, [](double x, double y, double z) { return x * x + y * y + z * z; })));
  return r / scale;
}

/**
 * @brief Relative deviation between the fast path and the brute-force oracle on `count`
 *        seeded random densities. Nodal vectors are compared; use Truncation::full for an
 *        exact comparison at any beta.
 */
inline double oracle_deviation(int N, const CollisionKernel& kernel, Truncation truncation, int count,
                               std::uint64_t seed, int threads, bool hermite_tested_only = false)
{
  const auto oracle = build_oracle(N, kernel, 0, threads);
  auto T = std::make_shared<const TransformSet>(N, truncation);
  CollisionOperator op(T, kernel, OracleOrders::exact_for(N).outer, threads);
  double worst = 0;
  for (int s = 0; s < count; ++s) {
    const auto f = random_density(N, seed + s, 0.4, 1.0 + 0.5 * s, {0.3 * s, -0.2, 0.1});
    auto fast = op.evaluate(f);
    auto ref = oracle.apply(f);
    if (hermite_tested_only) {
      fast = hermite_tested(fast, *T);
      ref = hermite_tested(ref, *T);
    }
    worst = std::max(worst, max_abs_diff(fast, ref) / max_abs(ref));
  }
  return worst;
}

/// Orthogonality, round trip, isometry and dimension counts of the basis transforms.
inline std::vector<CheckResult> transform_suite(int N, Truncation truncation = Truncation::degree_N,
                                                std::uint64_t seed = 1)
{
  std::vector<CheckResult> out;
  TransformSet T(N, truncation);
  const int K = T.truncation_degree();
  TransformWorkspace ws;

  out.push_back({"dimension counts N=" + std::to_string(N),
                 static_cast<int>(T.maps().cylinder().size()) == hierarchical_dim(K) &&
                     static_cast<int>(T.maps().spherical().size()) == hierarchical_dim(K) &&
                     T.hier_dim() == (K + 1) * (K + 2) * (K + 3) / 6,
                 0.0, 0.0});

  double orth = 0;
  for (int i = 0; i <= K; ++i) {
    const Matrix& B = T.hermite_to_cylinder_block(i);
    orth = std::max(orth, (B * B.transpose() - Matrix::Identity(B.rows(), B.rows())).cwiseAbs().maxCoeff());
  }
  for (int k = 0; k <= K; ++k)
    for (int m = 0; m <= k; ++m) {
      const Matrix& B = T.cylinder_to_spherical_block(k, m);
      orth = std::max(orth, (B * B.transpose() - Matrix::Identity(B.rows(), B.rows())).cwiseAbs().maxCoeff());
    }
  out.push_back({"block orthogonality N=" + std::to_string(N), orth <= 1e-12, orth, 1e-12});

  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  std::vector<double> h(T.hier_dim()), theta(T.hier_dim()), phi(T.hier_dim()), back(T.hier_dim()),
      h2(T.hier_dim());
  for (auto& x : h) x = dist(gen);
  T.hermite_to_cylinder(h, theta);
  T.cylinder_to_spherical(theta, phi, ws);
  T.spherical_to_cylinder(phi, back, ws);
  T.cylinder_to_hermite(back, h2);
  const double rt = max_abs_diff(h, h2) / max_abs(h);
  out.push_back({"round trip N=" + std::to_string(N), rt <= 1e-12, rt, 1e-12});

  double nh = 0, np = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    nh += h[i] * h[i];
    np += phi[i] * phi[i];
  }
  const double iso = std::abs(std::sqrt(np) - std::sqrt(nh)) / std::sqrt(nh);
  out.push_back({"isometry N=" + std::to_string(N), iso <= 1e-12, iso, 1e-12});
  return out;
}

}  // namespace boltzmann
