#include "mkv/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mkv/problems.hpp"
#include "mkv/quant.hpp"
#include "mkv/regmc.hpp"

namespace mkv {

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------
namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

const char* const kKnownKeys[] = {
    "schema_version", "problem", "method", "iteration", "seed", "paths", "out", "sweep_param",
    "sweep_values", "timings",
    // shared problem parameters
    "T", "N", "sigma", "b0", "gamma0", "a_lo", "a_hi",
    // liquidation / selection
    "gamma", "eta", "s0", "y0", "p", "x0",
    // systemic
    "kappa", "rho", "c",
    // solver knobs
    "L", "L_state", "w_scale_sqrt", "y_radius", "x_radius", "xbar_radius", "y_mult",
    "train_paths", "rl_degree", "cr_degree", "search", "search_tol", "multistart", "ridge_rel",
    "shared_covariance", "cr_runs", "explore_rounds", "explore_paths", "resim_paths",
};

bool known_key(const std::string& k) {
  for (const char* s : kKnownKeys)
    if (k == s) return true;
  return false;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (!known_key(key)) throw ConfigError("unknown config key: " + key);
    cfg.kv[key] = val;
  }
  if (cfg.str_or("schema_version", "") != "1")
    throw ConfigError("config: schema_version=1 required");
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return parse_text(os.str());
}

std::string ExperimentConfig::str(const std::string& key) const {
  auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError("missing config key: " + key);
  return it->second;
}

std::string ExperimentConfig::str_or(const std::string& key, const std::string& fallback) const {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

double ExperimentConfig::num(const std::string& key) const {
  const std::string v = str(key);
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": not a number: " + v);
  }
}

double ExperimentConfig::num_or(const std::string& key, double fallback) const {
  return has(key) ? num(key) : fallback;
}

long ExperimentConfig::integer_or(const std::string& key, long fallback) const {
  if (!has(key)) return fallback;
  double x = num(key);
  long n = static_cast<long>(x);
  if (static_cast<double>(n) != x) throw ConfigError("config key " + key + ": integer required");
  return n;
}

std::vector<double> ExperimentConfig::num_list(const std::string& key) const {
  std::vector<double> out;
  std::istringstream is(str(key));
  std::string tok;
  while (std::getline(is, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + ": bad list entry: " + tok);
    }
  }
  if (out.empty()) throw ConfigError("config key " + key + ": empty list");
  return out;
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream os;
  for (const auto& [k, v] : kv) os << k << '=' << v << '\n';
  return os.str();
}

std::string ExperimentConfig::hash() const {
  // FNV-1a 64
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Problem assembly
// ---------------------------------------------------------------------------
namespace {

constexpr const char* kToolVersion = "mkvsolve 0.1.0";

struct Built {
  DiscreteProblem solve;  // what the solvers consume
  DiscreteProblem eval;   // forward-evaluation dynamics (equal value)
  std::string problem;
};

TimeGrid grid_from(const ExperimentConfig& cfg, double T_def, long N_def) {
  return TimeGrid(cfg.num_or("T", T_def), static_cast<int>(cfg.integer_or("N", N_def)));
}

LiquidationParams liq_params(const ExperimentConfig& cfg) {
  LiquidationParams p;
  p.gamma = cfg.num_or("gamma", p.gamma);
  p.eta = cfg.num_or("eta", p.eta);
  p.sigma = cfg.num_or("sigma", p.sigma);
  p.b0 = cfg.num_or("b0", p.b0);
  p.gamma0 = cfg.num_or("gamma0", p.gamma0);
  p.s0 = cfg.num_or("s0", p.s0);
  p.y0 = cfg.num_or("y0", p.y0);
  p.grid = grid_from(cfg, 1.0, 100);
  p.a_lo = cfg.num_or("a_lo", p.a_lo);
  p.a_hi = cfg.num_or("a_hi", p.a_hi);
  return p;
}

SelectionParams sel_params(const ExperimentConfig& cfg) {
  SelectionParams p;
  p.p = cfg.num_or("p", p.p);
  p.sigma = cfg.num_or("sigma", p.sigma);
  p.b0 = cfg.num_or("b0", p.b0);
  p.gamma0 = cfg.num_or("gamma0", p.gamma0);
  p.s0 = cfg.num_or("s0", p.s0);
  p.x0 = cfg.num_or("x0", p.x0);
  p.grid = grid_from(cfg, 1.0, 100);
  p.a_lo = cfg.num_or("a_lo", p.a_lo);
  p.a_hi = cfg.num_or("a_hi", p.a_hi);
  return p;
}

SystemicParams sys_params(const ExperimentConfig& cfg) {
  SystemicParams p;
  p.kappa = cfg.num_or("kappa", p.kappa);
  p.sigma = cfg.num_or("sigma", p.sigma);
  p.rho = cfg.num_or("rho", p.rho);
  p.eta = cfg.num_or("eta", p.eta);
  p.c = cfg.num_or("c", p.c);
  p.x0 = cfg.num_or("x0", p.x0);
  p.y0 = cfg.num_or("y0", p.y0);
  p.grid = grid_from(cfg, 1.0, 100);
  p.a_lo = cfg.num_or("a_lo", p.a_lo);
  p.a_hi = cfg.num_or("a_hi", p.a_hi);
  return p;
}

ExperimentConfig with_override(const ExperimentConfig& cfg, const std::string& key, double value) {
  ExperimentConfig out = cfg;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  out.kv[key] = buf;
  return out;
}

SearchSpec search_from(const ExperimentConfig& cfg, const std::string& fallback) {
  SearchSpec spec;
  std::string m = cfg.str_or("search", fallback);
  if (m == "golden")
    spec.method = SearchMethod::GoldenSection;
  else if (m == "brent")
    spec.method = SearchMethod::BracketedParabolic;
  else if (m == "quadratic")
    spec.method = SearchMethod::ClosedFormQuadratic;
  else if (m == "exhaustive")
    spec.method = SearchMethod::Exhaustive;
  else
    throw ConfigError("unknown search method: " + m);
  spec.tolerance = cfg.num_or("search_tol", 1e-6);
  spec.multistart = static_cast<int>(cfg.integer_or("multistart", 0));
  return spec;
}

struct SolveOutput {
  std::unique_ptr<Policy> policy;
  std::vector<std::pair<std::string, double>> diagnostics;
};

// quantization grids per problem
LayerGrids grids_for(const std::string& problem, const ExperimentConfig& cfg,
                     const DiscreteProblem& prob, const Quantizer& base) {
  if (problem == "liquidation") {
    LiquidationParams p = liq_params(cfg);
    const double yr = cfg.num_or("y_radius", 0.35);
    std::vector<GridScheme> schemes;
    schemes.push_back(BrownianScaled{1.0, cfg.integer_or("w_scale_sqrt", 1) != 0});
    schemes.push_back(Centered{[p](double t) { return p.y0 - t / p.grid.horizon; },
                               [yr](double t) { return yr * t; }});
    return build_layer_grids(prob.grid, schemes, base, prob.z0);
  }
  if (problem == "selection") {
    const double xr = cfg.num_or("x_radius", 1.0);
    std::vector<GridScheme> schemes;
    schemes.push_back(BrownianScaled{1.0, cfg.integer_or("w_scale_sqrt", 1) != 0});
    schemes.push_back(Centered{[](double) { return 0.0; },
                               [xr](double t) { return xr * std::sqrt(t); }});
    return build_layer_grids(prob.grid, schemes, base, prob.z0);
  }
  if (problem == "systemic") {
    SystemicParams p = sys_params(cfg);
    const double xbr = cfg.num_or("xbar_radius", 1.0);
    const double ymult = cfg.num_or("y_mult", 2.0);
    auto yfloor = systemic_uncontrolled_variance(p);
    const int Ls = base.size();
    Empirical ygrid;
    ygrid.points.resize(p.grid.steps + 1);
    for (int n = 0; n <= p.grid.steps; ++n) {
      double upper = std::max(ymult * yfloor[n], 1e-3);
      ygrid.points[n].resize(Ls);
      for (int l = 0; l < Ls; ++l) ygrid.points[n][l] = upper * (l + 0.5) / Ls;
    }
    std::vector<GridScheme> schemes;
    schemes.push_back(Centered{[p](double) { return p.x0; },
                               [p, xbr](double t) {
                                 return xbr * p.sigma * std::abs(p.rho) * p.x0 * std::sqrt(t);
                               }});
    schemes.push_back(std::move(ygrid));
    std::vector<GridOptions> opts(2);
    opts[1].strictly_positive = true;
    return build_layer_grids(prob.grid, schemes, base, prob.z0, opts);
  }
  throw ConfigError("unknown problem: " + problem);
}

SolveOutput solve_quant(const std::string& problem, const ExperimentConfig& cfg,
                        const DiscreteProblem& prob, bool semilinear, std::uint64_t seed) {
  const int L = static_cast<int>(cfg.integer_or("L", 50));
  const int Ls = static_cast<int>(cfg.integer_or("L_state", 101));
  Quantizer noise = lloyd_gaussian(L);
  Quantizer base = (Ls == L) ? noise : lloyd_gaussian(Ls);
  LayerGrids grids = grids_for(problem, cfg, prob, base);
  SearchSpec spec = search_from(cfg, "brent");
  if (spec.multistart <= 0) spec.multistart = semilinear ? 1 : 4;
  QuantInterp interp = semilinear ? QuantInterp::SemiLinear : QuantInterp::PiecewiseConstant;

  SolveOutput out;
  if (cfg.str_or("iteration", "value") == "performance") {
    QuantBackend backend(prob, std::move(grids), noise, interp, 1);
    PerformanceIterationOptions popt;
    popt.seed = seed;
    popt.resim_paths = static_cast<int>(cfg.integer_or("resim_paths", 4));
    out.policy = performance_iteration_backward(prob, backend, spec, popt);
    out.diagnostics.emplace_back("boundary_hit_rate",
                                 backend.diagnostics().transitions
                                     ? double(backend.diagnostics().boundary_hits) /
                                           double(backend.diagnostics().transitions)
                                     : 0.0);
  } else {
    QBackwardResult r = q_backward(prob, std::move(grids), noise, spec, interp, 1);
    out.policy = std::move(r.policy);
    out.diagnostics.emplace_back("boundary_hit_rate",
                                 r.diagnostics.transitions
                                     ? double(r.diagnostics.boundary_hits) /
                                           double(r.diagnostics.transitions)
                                     : 0.0);
  }
  out.diagnostics.emplace_back("quantizer_distortion", noise.distortion);
  return out;
}

// liquidation basis block u = s0 exp(sigma w): spans the same per-layer space
// as the spot price and has exact one-step conditioning
RlBasis liquidation_rl_basis(const LiquidationParams& p, const DiscreteProblem& prob) {
  RlBasis b;
  const double sigma = p.sigma, s0 = p.s0;
  const double dt = prob.grid.dt();
  auto u = [sigma, s0](const Vec& z) { return s0 * std::exp(sigma * z[0]); };
  // E[u' | z] = u e^{sigma^2 dt / 2}; y' = y + a dt deterministic
  const double mgf = std::exp(0.5 * sigma * sigma * dt);
  b.value = {
      [](const Vec&) { return 1.0; },
      [u](const Vec& z) { return u(z); },
      [](const Vec& z) { return z[1]; },
      [](const Vec& z) { return z[1] * z[1]; },
      [u](const Vec& z) { return u(z) * z[1]; },
      [u](const Vec& z) { return u(z) * z[1] * z[1]; },
  };
  b.cond = {
      [](int, const Vec&, double) { return 1.0; },
      [u, mgf](int, const Vec& z, double) { return u(z) * mgf; },
      [dt](int, const Vec& z, double a) { return z[1] + a * dt; },
      [dt](int, const Vec& z, double a) {
        double y = z[1] + a * dt;
        return y * y;
      },
      [u, mgf, dt](int, const Vec& z, double a) { return u(z) * mgf * (z[1] + a * dt); },
      [u, mgf, dt](int, const Vec& z, double a) {
        double y = z[1] + a * dt;
        return u(z) * mgf * y * y;
      },
  };
  b.names = {"1", "u", "y", "y^2", "u*y", "u*y^2"};
  return b;
}

CrBasis liquidation_cr_basis(const LiquidationParams& p) {
  CrBasis b;
  const double sigma = p.sigma, s0 = p.s0;
  auto u = [sigma, s0](const Vec& z) { return s0 * std::exp(sigma * z[0]); };
  b.fns = {
      [](const Vec&, double) { return 1.0; },
      [u](const Vec& z, double) { return u(z); },
      [](const Vec& z, double) { return z[1]; },
      [](const Vec& z, double) { return z[1] * z[1]; },
      [u](const Vec& z, double) { return u(z) * z[1]; },
      [u](const Vec& z, double) { return u(z) * z[1] * z[1]; },
      [](const Vec&, double a) { return a; },
      [](const Vec&, double a) { return a * a; },
      [](const Vec& z, double a) { return a * z[1]; },
      [u](const Vec& z, double a) { return a * u(z); },
  };
  b.names = {"1", "u", "y", "y^2", "u*y", "u*y^2", "a", "a^2", "a*y", "a*u"};
  return b;
}

TrainingDesign rl_design_for(const std::string& problem, const ExperimentConfig& cfg,
                             const DiscreteProblem& prob) {
  const int M = static_cast<int>(cfg.integer_or("train_paths", problem == "systemic" ? 30000 : 10000));
  if (problem == "liquidation") {
    LiquidationParams p = liq_params(cfg);
    TrainingDesign d;
    d.count = M;
    const double T = p.grid.horizon;
    d.sample = [T, grid = prob.grid](int n, RngStream& rng) {
      const double t = grid.node(n);
      double w = std::sqrt(t) * rng.normal();
      double lo = -0.5, hi = 0.5 + (t > 0 ? (T - t) / t : 0.0);
      double y = lo + (hi - lo) * rng.uniform();
      return Vec{w, y};
    };
    return d;
  }
  if (problem == "systemic") {
    SystemicParams p = sys_params(cfg);
    auto yfloor = systemic_uncontrolled_variance(p);
    const double ymult = cfg.num_or("y_mult", 2.0);
    TrainingDesign d;
    d.count = M;
    d.sample = [p, yfloor, ymult](int n, RngStream& rng) {
      const double t = p.grid.node(n);
      double rx = 1.5 * std::max(p.sigma * std::abs(p.rho) * p.x0 * std::sqrt(t), 0.02);
      double x = p.x0 + rx * rng.normal();
      double ry = std::max(ymult * yfloor[n], 1e-3);
      double y = std::abs(ry * rng.normal());
      return Vec{x, y};
    };
    return d;
  }
  if (problem == "selection") {
    const double xr = cfg.num_or("x_radius", 1.0);
    TrainingDesign d;
    d.count = M;
    d.sample = [xr, grid = prob.grid](int n, RngStream& rng) {
      const double t = grid.node(n);
      return Vec{std::sqrt(t) * rng.normal(), xr * std::sqrt(t) * rng.normal()};
    };
    return d;
  }
  throw ConfigError("unknown problem: " + problem);
}

SolveOutput solve_rlmc(const std::string& problem, const ExperimentConfig& cfg,
                       const DiscreteProblem& prob, std::uint64_t seed) {
  RlBasis basis;
  std::string search_default = "brent";
  if (problem == "liquidation") {
    basis = liquidation_rl_basis(liq_params(cfg), prob);
  } else {
    const int deg = static_cast<int>(cfg.integer_or("rl_degree", 2));
    basis = monomial_rl_basis(prob, deg);
    if (problem == "systemic" && deg <= 2) search_default = "quadratic";
  }
  TrainingDesign design = rl_design_for(problem, cfg, prob);
  SearchSpec spec = search_from(cfg, search_default);
  if (spec.multistart <= 0) spec.multistart = 1;
  RegressionOptions ropt;
  ropt.seed = seed;
  ropt.ridge_rel = cfg.num_or("ridge_rel", 1e-8);
  ropt.shared_covariance = cfg.integer_or("shared_covariance", 0) != 0;

  SolveOutput out;
  const int rounds = static_cast<int>(cfg.integer_or("explore_rounds", 1));
  if (cfg.str_or("iteration", "value") == "performance") {
    RlBackend backend(prob, basis, design, ropt);
    PerformanceIterationOptions popt;
    popt.seed = seed;
    popt.resim_paths = static_cast<int>(cfg.integer_or("resim_paths", 1));
    out.policy = performance_iteration_backward(prob, backend, spec, popt);
  } else if (rounds > 1) {
    ExploreExploitOptions eopt;
    eopt.rounds = rounds;
    eopt.harvest_paths = static_cast<int>(cfg.integer_or("explore_paths", 2000));
    eopt.seed = seed;
    out.policy = rl_explore_exploit(prob, basis, design, spec, ropt, eopt);
  } else {
    RegressionRun run = rl_backward(prob, basis, design, spec, ropt);
    double cmax = 0.0;
    for (double c : run.condition_numbers) cmax = std::max(cmax, c);
    out.diagnostics.emplace_back("max_condition", cmax);
    out.policy = std::move(run.policy);
  }
  return out;
}

SolveOutput solve_cr(const std::string& problem, const ExperimentConfig& cfg,
                     const DiscreteProblem& prob, const DiscreteProblem& eval_prob,
                     long eval_paths, std::uint64_t seed) {
  CrBasis basis;
  if (problem == "liquidation")
    basis = liquidation_cr_basis(liq_params(cfg));
  else
    basis = monomial_cr_basis(prob.dim, static_cast<int>(cfg.integer_or("cr_degree", 3)));

  const int M = static_cast<int>(cfg.integer_or("train_paths", 10000));
  const double lo = space_lo(prob.controls), hi = space_hi(prob.controls);
  Randomization base;
  base.paths = M;
  base.sample = [lo, hi](int, RngStream& rng) { return lo + (hi - lo) * rng.uniform(); };
  SearchSpec spec = search_from(cfg, "brent");
  if (spec.multistart <= 0) spec.multistart = 1;
  RegressionOptions ropt;
  ropt.ridge_rel = cfg.num_or("ridge_rel", 1e-8);

  const int runs = static_cast<int>(cfg.integer_or("cr_runs", 1));
  const int rounds = static_cast<int>(cfg.integer_or("explore_rounds", 1));
  SolveOutput out;
  double best = 0.0;
  // single-run variance is high; the benchmark protocol keeps the best of
  // `cr_runs` independently seeded runs by forward value
  for (int r = 0; r < runs; ++r) {
    RegressionOptions ro = ropt;
    ro.seed = seed + 1000003ULL * r;
    std::unique_ptr<Policy> policy;
    if (cfg.str_or("iteration", "value") == "performance") {
      CrBackend backend(prob, basis, base, ro);
      PerformanceIterationOptions popt;
      popt.seed = ro.seed;
      popt.resim_paths = static_cast<int>(cfg.integer_or("resim_paths", 1));
      policy = performance_iteration_backward(prob, backend, spec, popt);
    } else if (rounds > 1) {
      ExploreExploitOptions eopt;
      eopt.rounds = rounds;
      eopt.harvest_paths = static_cast<int>(cfg.integer_or("explore_paths", 2000));
      eopt.seed = ro.seed;
      policy = cr_explore_exploit(prob, basis, base, spec, ro, eopt);
    } else {
      RegressionRun run = cr_backward(prob, basis, base, spec, ro);
      policy = std::move(run.policy);
    }
    if (runs == 1) {
      out.policy = std::move(policy);
      break;
    }
    // pilot evaluation to rank runs
    ValueEstimate v = evaluate_policy(eval_prob, *policy, eval_prob.z0,
                                      std::max(2000L, eval_paths / 50), seed ^ 0xBE57ULL);
    double score = prob.sense == Sense::Maximize ? v.mean : -v.mean;
    if (!out.policy || score > best) {
      best = score;
      out.policy = std::move(policy);
    }
  }
  out.diagnostics.emplace_back("cr_runs", runs);
  return out;
}

Built build_problems(const std::string& problem, const ExperimentConfig& cfg) {
  Built b;
  b.problem = problem;
  if (problem == "liquidation") {
    LiquidationParams p = liq_params(cfg);
    b.solve = liquidation_problem(p);
    b.eval = liquidation_sampling_problem(p);
  } else if (problem == "selection") {
    SelectionParams p = sel_params(cfg);
    b.solve = selection_problem(p);
    b.eval = selection_sampling_problem(p);
  } else if (problem == "systemic") {
    SystemicParams p = sys_params(cfg);
    b.solve = systemic_problem(p);
    b.eval = b.solve;
  } else {
    throw ConfigError("unknown problem: " + problem);
  }
  return b;
}

SolveOutput build_policy(const std::string& method, const std::string& problem,
                         const ExperimentConfig& cfg, const Built& built, long eval_paths,
                         std::uint64_t seed) {
  SolveOutput out;
  if (method == "opt") {
    if (problem == "liquidation")
      out.policy = liquidation_opt_policy(liq_params(cfg));
    else if (problem == "selection") {
      SelectionParams p = sel_params(cfg);
      out.policy = selection_opt_policy(p);
      out.diagnostics.emplace_back("closed_form_value", selection_closed_form_value(p));
    } else
      throw ConfigError("method opt: no closed-form reference for problem " + problem);
  } else if (method == "bench") {
    if (problem == "liquidation")
      out.policy = liquidation_bench_policy(liq_params(cfg));
    else
      out.policy = std::make_unique<ConstantRatePolicy>(
          clamp_control(built.solve.controls, 0.0));
  } else if (method == "q-semilinear" || method == "q-pc") {
    out = solve_quant(problem, cfg, built.solve, method == "q-semilinear", seed);
  } else if (method == "rlmc") {
    out = solve_rlmc(problem, cfg, built.solve, seed);
  } else if (method == "cr") {
    out = solve_cr(problem, cfg, built.solve, built.eval, eval_paths, seed);
  } else {
    throw ConfigError("unknown method: " + method);
  }
  return out;
}

void write_csv(const std::string& path, const ExperimentConfig& cfg, const RunReport& report,
               bool timings) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << "# " << kToolVersion << "\n";
  f << "# config_hash=" << report.config_hash << "\n";
  f << "# seed=" << report.seed << "\n";
  std::istringstream canon(cfg.canonical());
  std::string line;
  while (std::getline(canon, line)) f << "# cfg:" << line << "\n";
  for (const auto& n : report.notes) f << "# note:" << n << "\n";
  f << "sweep_value,method,estimate,std_error" << (timings ? ",runtime_s" : "") << "\n";
  char buf[64];
  for (const RunRow& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%.12g", r.sweep_value);
    f << buf << ',' << r.method << ',';
    std::snprintf(buf, sizeof buf, "%.12g", r.estimate);
    f << buf << ',';
    std::snprintf(buf, sizeof buf, "%.12g", r.std_error);
    f << buf;
    if (timings) {
      std::snprintf(buf, sizeof buf, "%.3f", r.runtime_s);
      f << ',' << buf;
    }
    f << "\n";
  }
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg) {
  const std::string problem = cfg.str("problem");
  const std::string method = cfg.str("method");
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.integer_or("seed", 1));
  const long paths = cfg.integer_or("paths", 100000);
  const bool timings = cfg.integer_or("timings", 0) != 0;

  std::vector<std::pair<std::string, double>> sweep;
  if (cfg.has("sweep_param")) {
    for (double v : cfg.num_list("sweep_values")) sweep.emplace_back(cfg.str("sweep_param"), v);
  } else {
    sweep.emplace_back("", 0.0);
  }

  RunReport report;
  report.config_hash = cfg.hash();
  report.seed = seed;

  for (const auto& [param, value] : sweep) {
    ExperimentConfig c = param.empty() ? cfg : with_override(cfg, param, value);
    auto t0 = std::chrono::steady_clock::now();
    Built built = build_problems(problem, c);
    SolveOutput sol = build_policy(method, problem, c, built, paths, seed);
    ValueEstimate est = evaluate_policy(built.eval, *sol.policy, built.eval.z0, paths, seed);
    auto t1 = std::chrono::steady_clock::now();

    RunRow row;
    row.sweep_value = value;
    row.method = method;
    row.estimate = est.mean;
    row.std_error = est.std_error;
    row.runtime_s = std::chrono::duration<double>(t1 - t0).count();
    row.diagnostics = std::move(sol.diagnostics);
    report.rows.push_back(std::move(row));
  }

  write_csv(cfg.str_or("out", "run.csv"), cfg, report, timings);
  return report;
}

void emit_paths(const ExperimentConfig& cfg, int count, const std::string& out_path) {
  const std::string problem = cfg.str("problem");
  const std::string method = cfg.str("method");
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.integer_or("seed", 1));

  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + out_path);
  f << "# " << kToolVersion << "\n";
  f << "# config_hash=" << cfg.hash() << "\n";
  f << "# seed=" << seed << "\n";

  Built built = build_problems(problem, cfg);
  f << "path,step,t";
  for (int k = 0; k < built.eval.dim; ++k) f << ",z" << k;
  f << ",control\n";
  if (count <= 0) return;

  SolveOutput sol = build_policy(method, problem, cfg, built, count, seed);
  PathSet ps = simulate_paths(built.eval, *sol.policy, built.eval.z0, count, seed);
  char buf[64];
  for (int m = 0; m < ps.n_paths; ++m) {
    for (int n = 0; n <= ps.n_steps; ++n) {
      f << m << ',' << n << ',';
      std::snprintf(buf, sizeof buf, "%.12g", built.eval.grid.node(n));
      f << buf;
      for (int k = 0; k < ps.dim; ++k) {
        std::snprintf(buf, sizeof buf, "%.12g", ps.state(m, n, k));
        f << ',' << buf;
      }
      if (n < ps.n_steps) {
        std::snprintf(buf, sizeof buf, "%.12g", ps.control(m, n));
        f << ',' << buf;
      } else {
        f << ',';
      }
      f << "\n";
    }
  }
}

}  // namespace mkv
