// boltz: experiment runner for the spectral Boltzmann collision operator.
//
//   boltz bkw      [--N 8] [--nip N] [--dt 0.1] [--t0 5.5] [--tend 8.5]
//   boltz moments  --kernel maxwell|hardsphere|angular|<kernel spec> [--reference ref.csv]
//   boltz bench    [--Ns 8,16,24] [--thread-list 1]
//   boltz verify   [--seed 7] [--kernel hardsphere]
//
// Exit codes: 0 success, 1 usage, 2 numerical failure, 3 I/O.

#include <boltzmann/experiments.hpp>
#include <boltzmann/parallel.hpp>
#include <boltzmann/version.hpp>

#include <CLI11/CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace boltzmann;
using json = nlohmann::json;

enum ExitCode { ok = 0, usage = 1, numerical = 2, io_failure = 3 };

struct UsageError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct IoFailure : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct Flags
{
  std::optional<int> N, nip, threads, quad;
  std::optional<double> dt, t0, tend, Tbar;
  std::optional<std::string> kernel, out, cache_dir, config, reference, truncation, projection;
  std::uint64_t seed = 7;
  std::string Ns = "8,16,24";
  std::string thread_list;
  int repeats = 1;
};

void add_common(CLI::App* app, Flags& f)
{
  app->add_option("--N", f.N, "polynomial degree per axis (>= 2)");
  app->add_option("--nip", f.nip, "outer Gauss-Hermite points per axis (default N)");
  app->add_option("--dt", f.dt, "RK4 time step");
  app->add_option("--t0", f.t0, "initial time");
  app->add_option("--tend", f.tend, "final time");
  app->add_option("--kernel", f.kernel, "maxwell | hardsphere | angular | vhs:beta=x | angular:beta=,p=,c=");
  app->add_option("--threads", f.threads, "worker threads (default BOLTZMANN_THREADS or hardware)");
  app->add_option("--out", f.out, "CSV output path ('-' for stdout); a .manifest.json is written next to it");
  app->add_option("--seed", f.seed, "seed for random densities");
  app->add_option("--cache-dir", f.cache_dir, "directory for precomputed transform caches");
  app->add_option("--config", f.config, "key=value or JSON file; command line flags take precedence");
  app->add_option("--truncation", f.truncation, "Hermite truncation of f2: N | 2N | full");
  app->add_option("--projection", f.projection, "initial projection: galerkin | collocation");
  app->add_option("--Tbar", f.Tbar, "trial-space temperature parameter");
}

// --- config files -----------------------------------------------------------

std::map<std::string, std::string> read_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  std::map<std::string, std::string> kv;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw UsageError("config '" + path + "': " + e.what());
    }
    for (auto it = j.begin(); it != j.end(); ++it)
      kv[it.key()] = it->is_string() ? it->get<std::string>() : it->dump();
    return kv;
  }
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) throw UsageError("config '" + path + "' line " + std::to_string(lineno) + ": expected key=value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

template <class T>
T parse_value(const std::string& key, const std::string& s)
{
  std::istringstream in(s);
  T v{};
  in >> v;
  if (!in || !(in >> std::ws).eof()) throw UsageError("config key '" + key + "': cannot parse '" + s + "'");
  return v;
}

Truncation parse_truncation(const std::string& s)
{
  if (s == "N") return Truncation::degree_N;
  if (s == "2N") return Truncation::degree_2N;
  if (s == "full") return Truncation::full;
  throw UsageError("--truncation must be N, 2N or full");
}

const char* truncation_name(Truncation t)
{
  return t == Truncation::degree_N ? "N" : t == Truncation::degree_2N ? "2N" : "full";
}

Projection parse_projection(const std::string& s)
{
  if (s == "galerkin") return Projection::galerkin;
  if (s == "collocation") return Projection::collocation;
  throw UsageError("--projection must be galerkin or collocation");
}

/// defaults < config file < flags
void resolve(ExperimentConfig& cfg, const Flags& f)
{
  const bool nip_default = !f.nip;
  if (f.config) {
    const auto kv = read_config(*f.config);
    for (const auto& [k, v] : kv) {
      if (k == "N") cfg.N = parse_value<int>(k, v);
      else if (k == "nip") cfg.n_ip = parse_value<int>(k, v);
      else if (k == "dt") cfg.dt = parse_value<double>(k, v);
      else if (k == "t0") cfg.t0 = parse_value<double>(k, v);
      else if (k == "tend") cfg.t_end = parse_value<double>(k, v);
      else if (k == "kernel") cfg.kernel = v;
      else if (k == "Tbar") cfg.Tbar = parse_value<double>(k, v);
      else if (k == "truncation") cfg.truncation = parse_truncation(v);
      else if (k == "projection") cfg.projection = parse_projection(v);
      else if (k == "out") cfg.output = v;
      else if (k == "threads" || k == "seed" || k == "cache-dir" || k == "reference") continue;
      else throw UsageError("config: unknown key '" + k + "'");
    }
    if (nip_default && !kv.count("nip")) cfg.n_ip = cfg.N;
  }
  if (f.N) {
    cfg.N = *f.N;
    if (nip_default) cfg.n_ip = cfg.N;
  }
  if (f.nip) cfg.n_ip = *f.nip;
  if (f.dt) cfg.dt = *f.dt;
  if (f.t0) cfg.t0 = *f.t0;
  if (f.tend) cfg.t_end = *f.tend;
  if (f.Tbar) cfg.Tbar = *f.Tbar;
  if (f.truncation) cfg.truncation = parse_truncation(*f.truncation);
  if (f.projection) cfg.projection = parse_projection(*f.projection);
  if (f.out) cfg.output = *f.out;
  try {
    cfg.validate();
    CollisionKernel::parse(cfg.kernel);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::optional<std::string> config_value(const Flags& f, const std::string& key)
{
  if (!f.config) return std::nullopt;
  const auto kv = read_config(*f.config);
  const auto it = kv.find(key);
  if (it == kv.end()) return std::nullopt;
  return it->second;
}

int resolve_threads(const Flags& f)
{
  if (f.threads) {
    if (*f.threads < 1) throw UsageError("--threads must be >= 1");
    return *f.threads;
  }
  if (const auto v = config_value(f, "threads")) return parse_value<int>("threads", *v);
  return default_thread_count();
}

std::optional<std::string> resolve_string(const std::optional<std::string>& flag, const Flags& f, const std::string& key)
{
  if (flag) return flag;
  return config_value(f, key);
}

// --- output -----------------------------------------------------------------

class Output
{
 public:
  explicit Output(const std::string& path)
      : path_(path)
  {
    if (path_.empty() || path_ == "-") return;
    const auto parent = std::filesystem::path(path_).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    file_.open(path_);
    if (!file_) throw IoFailure("cannot open output file '" + path_ + "'");
  }

  std::ostream& csv() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  std::ostream& log() { return file_.is_open() ? std::cout : std::cerr; }
  bool to_file() const { return file_.is_open(); }
  const std::string& path() const { return path_; }

  void finish(const json& manifest)
  {
    if (!to_file()) return;
    file_.close();
    if (!file_) throw IoFailure("error writing '" + path_ + "'");
    std::ofstream m(path_ + ".manifest.json");
    m << manifest.dump(2) << '\n';
    if (!m) throw IoFailure("error writing '" + path_ + ".manifest.json'");
  }

 private:
  std::string path_;
  std::ofstream file_;
};

json config_json(const ExperimentConfig& c)
{
  return {{"kernel", c.kernel},
          {"N", c.N},
          {"nip", c.n_ip},
          {"dt", c.dt},
          {"t0", c.t0},
          {"tend", c.t_end},
          {"initial", c.initial == InitialCondition::bkw ? "bkw" : "two_maxwellians"},
          {"Tbar", c.Tbar},
          {"Vbar", {c.Vbar[0], c.Vbar[1], c.Vbar[2]}},
          {"truncation", truncation_name(c.truncation)},
          {"projection", c.projection == Projection::galerkin ? "galerkin" : "collocation"}};
}

json manifest(const std::string& command, const ExperimentConfig& c, int threads, const RunTimings& t,
              const std::vector<std::string>& outputs)
{
  return {{"command", command},
          {"config", config_json(c)},
          {"version", boltzmann::version},
          {"threads", threads},
          {"wall_seconds",
           {{"build", t.build_seconds}, {"per_step", t.seconds_per_step}, {"integrate", t.integrate_seconds},
            {"total", t.total_seconds}}},
          {"outputs", outputs}};
}

std::shared_ptr<const TransformSet> transforms_for(const ExperimentConfig& c, const Flags& f)
{
  const auto dir = resolve_string(f.cache_dir, f, "cache-dir");
  if (!dir) return nullptr;
  try {
    return std::make_shared<const TransformSet>(TransformSet::cached(*dir, c.N, c.truncation));
  } catch (const io::IoError& e) {
    throw IoFailure(e.what());
  }
}

double conservation_drift(const std::vector<StepRecord>& steps)
{
  const auto& m0 = steps.front().moments;
  double d = 0;
  for (const auto& s : steps) {
    const auto& m = s.moments;
    d = std::max(d, std::abs(m.rho - m0.rho) / std::abs(m0.rho));
    d = std::max(d, std::abs(m.E - m0.E) / std::abs(m0.E));
    for (int i = 0; i < 3; ++i) d = std::max(d, std::abs(m.V[i] - m0.V[i]));
  }
  return d;
}

// --- commands ---------------------------------------------------------------

int cmd_bkw(const Flags& f)
{
  ExperimentConfig c = bkw_config();
  if (f.kernel && *f.kernel != "maxwell") throw UsageError("bkw: the BKW solution exists for --kernel maxwell only");
  resolve(c, f);
  if (c.kernel != "maxwell") throw UsageError("bkw: the BKW solution exists for kernel maxwell only");
  const int threads = resolve_threads(f);
  Output out(c.output);
  auto cols = moment_columns();
  cols.push_back("err_L2");
  cols.push_back("err_Linf");
  CsvWriter csv(out.csv(), cols);
  const auto result = run_experiment(c, threads, [&](const StepRecord& r) {
    auto row = moment_row(r.moments);
    row.push_back(r.errors->L2);
    row.push_back(r.errors->Linf);
    csv.row(row);
  }, transforms_for(c, f));
  const double drift = conservation_drift(result.steps);
  out.log() << "bkw N=" << c.N << " nip=" << c.n_ip << " dt=" << c.dt << ": max_L2=" << format_double(result.max_L2)
            << " max_Linf=" << format_double(result.max_Linf) << " conservation_drift=" << format_double(drift)
            << " seconds=" << result.timings.total_seconds << '\n';
  auto m = manifest("bkw", c, threads, result.timings, {out.path()});
  m["summary"] = {{"max_L2", result.max_L2}, {"max_Linf", result.max_Linf}, {"conservation_drift", drift}};
  out.finish(m);
  return ok;
}

int cmd_moments(const Flags& f)
{
  const auto kernel_flag = resolve_string(f.kernel, f, "kernel");
  if (!kernel_flag) throw UsageError("moments: --kernel is required (maxwell, hardsphere, angular)");
  ExperimentConfig c = moments_config(*kernel_flag);
  try {
    CollisionKernel::parse(c.kernel);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("moments: ") + e.what());
  }
  Flags g = f;
  g.kernel.reset();
  resolve(c, g);
  if (*kernel_flag != "maxwell" && *kernel_flag != "hardsphere" && *kernel_flag != "angular") c.kernel = *kernel_flag;
  const int threads = resolve_threads(f);
  const bool analytic = c.kernel == "maxwell";
  std::optional<std::vector<MomentSet>> reference;
  if (const auto ref = resolve_string(f.reference, f, "reference")) {
    try {
      reference = read_moment_trajectory(*ref);
    } catch (const std::invalid_argument& e) {
      throw IoFailure(e.what());
    } catch (const std::runtime_error& e) {
      throw IoFailure(e.what());
    }
  }
  Output out(c.output);
  auto cols = moment_columns();
  if (analytic) cols.push_back("err_analytic");
  CsvWriter csv(out.csv(), cols);
  const auto result = run_experiment(c, threads, [&](const StepRecord& r) {
    auto row = moment_row(r.moments);
    if (analytic) row.push_back(max_analytic_moment_error({r}));
    csv.row(row);
  }, transforms_for(c, f));
  const double drift = conservation_drift(result.steps);
  json summary = {{"conservation_drift", drift}};
  out.log() << "moments kernel=" << c.kernel << " N=" << c.N << " dt=" << c.dt
            << ": conservation_drift=" << format_double(drift);
  if (analytic) {
    const double e = max_analytic_moment_error(result.steps);
    summary["max_analytic_error"] = e;
    out.log() << " max_analytic_error=" << format_double(e);
  }
  if (reference) {
    const double e = max_reference_moment_error(moments_of(result.steps), *reference);
    summary["max_reference_error"] = e;
    out.log() << " max_reference_error=" << format_double(e);
  }
  out.log() << " seconds=" << result.timings.total_seconds << '\n';
  auto m = manifest("moments", c, threads, result.timings, {out.path()});
  m["summary"] = summary;
  out.finish(m);
  return ok;
}

std::vector<int> parse_int_list(const std::string& s, const char* what)
{
  std::vector<int> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + ": bad entry '" + item + "'");
    }
  }
  if (v.empty()) throw UsageError(std::string(what) + " is empty");
  return v;
}

int cmd_bench(const Flags& f)
{
  const auto Ns = parse_int_list(f.Ns, "--Ns");
  for (int N : Ns)
    if (N < 2) throw UsageError("--Ns entries must be >= 2");
  const auto threads = f.thread_list.empty() ? std::vector<int>{resolve_threads(f)}
                                             : parse_int_list(f.thread_list, "--thread-list");
  const std::string kernel = f.kernel.value_or("hardsphere");
  try {
    CollisionKernel::parse(kernel);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  Output out(f.out.value_or(""));
  CsvWriter csv(out.csv(), {"N", "threads", "seconds", "storage_MB"});
  json rows = json::array();
  std::map<int, std::vector<double>> times;
  for (int t : threads)
    for (int N : Ns) {
      const auto p = bench_collision(N, t, kernel, f.repeats);
      csv.row({double(N), double(t), p.seconds, p.storage_doubles * 8e-6});
      rows.push_back({{"N", N}, {"threads", t}, {"seconds", p.seconds}, {"storage_MB", p.storage_doubles * 8e-6}});
      times[t].push_back(p.seconds);
    }
  json slopes = json::object();
  if (Ns.size() >= 2) {
    std::vector<double> x(Ns.begin(), Ns.end());
    for (const auto& [t, y] : times) {
      const double s = loglog_slope(x, y);
      slopes[std::to_string(t)] = s;
      out.log() << "threads=" << t << " log-log slope over N = " << format_double(s) << '\n';
    }
  }
  if (threads.size() > 1) {
    for (std::size_t i = 0; i < Ns.size(); ++i)
      out.log() << "N=" << Ns[i] << " speedup(" << threads.back() << " vs " << threads.front()
                << " threads) = " << times[threads.front()][i] / times[threads.back()][i] << '\n';
  }
  json m = {{"command", "bench"}, {"version", boltzmann::version}, {"kernel", kernel}, {"results", rows},
            {"slopes", slopes}, {"outputs", {out.path()}}};
  out.finish(m);
  return ok;
}

int cmd_verify(const Flags& f)
{
  const int threads = resolve_threads(f);
  const std::string kernel = f.kernel.value_or("maxwell");
  std::vector<CheckResult> checks;
  auto add = [&](std::string name, double value, double tol) { checks.push_back({std::move(name), value <= tol, value, tol}); };

  add("oracle N=2 maxwell (Hermite-tested, truncation N)",
      oracle_deviation(2, CollisionKernel::maxwell(), Truncation::degree_N, 5, f.seed, threads, true), 1e-8);
  add("oracle N=2 maxwell (nodal, truncation full)",
      oracle_deviation(2, CollisionKernel::maxwell(), Truncation::full, 5, f.seed, threads), 1e-8);
  add("oracle N=3 hardsphere (nodal, truncation full)",
      oracle_deviation(3, CollisionKernel::hard_sphere(), Truncation::full, 5, f.seed, threads), 1e-7);

  for (const auto& name : {std::string("maxwell"), std::string("hardsphere"), kernel}) {
    const auto k = CollisionKernel::parse(name);
    auto T = std::make_shared<const TransformSet>(6);
    CollisionOperator op(T, k, 6, threads);
    double worst = 0;
    for (int s = 0; s < 5; ++s) worst = std::max(worst, conservation_residual(op.evaluate(random_density(6, f.seed + s)), *T));
    add("conservation N=6 " + name, worst, 1e-10);
    SpectralDensity m(6, 2.0, {0, 0, 0});
    std::fill(m.c.begin(), m.c.end(), 1.0);
    add("maxwellian annihilation N=6 " + name, max_abs(op.evaluate(m)), 1e-10);
  }

  for (int N : {2, 4, 8})
    for (auto& c : transform_suite(N, Truncation::degree_N, f.seed)) checks.push_back(c);

  if (CollisionKernel::parse(kernel).beta() != 0.0) {
    const double beta = CollisionKernel::parse(kernel).beta();
    double asym = 0;
    for (int l = 0; l <= 8; ++l) {
      const Matrix R = build_radial_mult(beta, l, 8);
      asym = std::max(asym, (R - R.transpose()).cwiseAbs().maxCoeff());
    }
    add("radial matrices symmetric (beta=" + format_double(beta) + ")", asym, 1e-12);
  }

  bool all = true;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "PASS  " : "FAIL  ") << c.name;
    if (c.tolerance > 0) std::cout << "  value=" << format_double(c.value) << " tol=" << format_double(c.tolerance);
    std::cout << '\n';
    all = all && c.pass;
  }
  std::cout << (all ? "all checks passed" : "some checks FAILED") << '\n';
  return all ? ok : numerical;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Spectral Petrov-Galerkin Boltzmann collision operator: experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(boltzmann::version));
  Flags flags;
  auto* bkw = app.add_subcommand("bkw", "BKW solution for Maxwell molecules: moments and L2 / Linf errors");
  auto* moments = app.add_subcommand("moments", "two-peak initial data: moment trajectories");
  auto* bench = app.add_subcommand("bench", "wall time and storage of one collision evaluation");
  auto* verify = app.add_subcommand("verify", "oracle, conservation and transform checks");
  for (auto* s : {bkw, moments, bench, verify}) add_common(s, flags);
  moments->add_option("--reference", flags.reference, "reference moment CSV for self-convergence errors");
  bench->add_option("--Ns", flags.Ns, "comma-separated degrees");
  bench->add_option("--thread-list", flags.thread_list, "comma-separated thread counts");
  bench->add_option("--repeats", flags.repeats, "evaluations per configuration (best is kept)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? ok : usage;
  }

  try {
    if (*bkw) return cmd_bkw(flags);
    if (*moments) return cmd_moments(flags);
    if (*bench) return cmd_bench(flags);
    if (*verify) return cmd_verify(flags);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n\n" << app.help() << '\n';
    return usage;
  } catch (const IoFailure& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return io_failure;
  } catch (const io::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return io_failure;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return numerical;
  } catch (const std::domain_error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return numerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return numerical;
  }
  return usage;
}
