#include "mkv/problems.hpp"

#include <cmath>

namespace mkv {

double weight_F(double t, double w, const GaussianPriorWeight& params) {
  if (t < 0.0) throw std::invalid_argument("weight_F: t >= 0 required");
  const double s2 = params.sigma * params.sigma;
  const double d = s2 + params.gamma0 * params.gamma0 * t;
  const double expo =
      (-params.b0 * params.b0 * t + 2.0 * params.b0 * params.sigma * w +
       params.gamma0 * params.gamma0 * w * w) /
      (2.0 * d);
  return params.sigma / std::sqrt(d) * std::exp(expo);
}

double erfi(double x) {
  if (std::abs(x) > 6.0) throw std::domain_error("erfi: |x| <= 6 supported");
  // Taylor series sum x^(2k+1) / (k! (2k+1)); all terms positive, no
  // cancellation on this range.
  static const double kTwoOverSqrtPi = 1.1283791670955125739;
  const double x2 = x * x;
  double term = x;
  double sum = x;
  for (int k = 1; k < 200; ++k) {
    term *= x2 / k;
    double add = term / (2 * k + 1);
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  return kTwoOverSqrtPi * sum;
}

// ---------------------------------------------------------------------------
// Liquidation
// ---------------------------------------------------------------------------
double liquidation_price(double t, double w, const LiquidationParams& p) {
  return p.s0 * std::exp(p.sigma * w - 0.5 * p.sigma * p.sigma * t);
}

DiscreteProblem liquidation_problem(const LiquidationParams& p) {
  DiscreteProblem prob;
  prob.dim = 2;
  prob.sense = Sense::Minimize;
  prob.grid = p.grid;
  prob.controls = make_interval(p.a_lo, p.a_hi);
  prob.z0 = Vec{0.0, p.y0};
  prob.drift = [](const Vec&, double a) { return Vec{0.0, a}; };
  prob.diffusion = [](const Vec&, double) { return Vec{1.0, 0.0}; };
  GaussianPriorWeight gw{p.b0, p.gamma0, p.sigma};
  prob.running_cost = [p, gw](double t, const Vec& z, double a) {
    const double s = liquidation_price(t, z[0], p);
    return weight_F(t, z[0], gw) * a * (s + p.gamma * a);
  };
  prob.terminal_cost = [p, gw](const Vec& z) {
    return weight_F(p.grid.horizon, z[0], gw) * p.eta * z[1] * z[1];
  };
  return prob;
}

DiscreteProblem liquidation_sampling_problem(const LiquidationParams& p) {
  DiscreteProblem prob;
  prob.dim = 3;  // (w, y, beta)
  prob.sense = Sense::Minimize;
  prob.grid = p.grid;
  prob.controls = make_interval(p.a_lo, p.a_hi);
  prob.z0 = Vec{0.0, p.y0, p.b0};
  const double sigma = p.sigma;
  prob.drift = [sigma](const Vec& z, double a) { return Vec{z[2] / sigma, a, 0.0}; };
  prob.diffusion = [](const Vec&, double) { return Vec{1.0, 0.0, 0.0}; };
  prob.running_cost = [p](double t, const Vec& z, double a) {
    return a * (liquidation_price(t, z[0], p) + p.gamma * a);
  };
  prob.terminal_cost = [p](const Vec& z) { return p.eta * z[1] * z[1]; };
  prob.sample_initial = [p](const Vec& z0, RngStream& rng) {
    Vec z = z0;
    z[2] = p.b0 + p.gamma0 * rng.normal();
    return z;
  };
  return prob;
}

double liquidation_opt_rate(double t, double s, double y, const LiquidationParams& p) {
  const double tau = p.grid.horizon - t;
  const double k = tau + p.gamma / p.eta;
  // integral of the expected forward price over [t,T], per unit of spot
  double q;
  if (p.gamma0 > 0.0) {
    const double g0 = p.gamma0;
    static const double kSqrtPiOver2 = 1.2533141373155002512;
    q = (kSqrtPiOver2 / g0) * std::exp(-p.b0 * p.b0 / (2.0 * g0 * g0)) *
        (erfi((p.b0 + g0 * g0 * tau) / (std::sqrt(2.0) * g0)) -
         erfi(p.b0 / (std::sqrt(2.0) * g0)));
  } else if (p.b0 != 0.0) {
    q = (std::exp(p.b0 * tau) - 1.0) / p.b0;
  } else {
    q = tau;
  }
  return -(1.0 / k) * (y + (1.0 / (2.0 * p.gamma)) * (-q + k) * s);
}

std::unique_ptr<Policy> liquidation_opt_policy(const LiquidationParams& p) {
  // per-step rate coefficients: a(t, s, y) = cy(t) y + cs(t) s
  const int N = p.grid.steps;
  std::vector<double> cy(N), cs(N);
  for (int n = 0; n < N; ++n) {
    const double t = p.grid.node(n);
    cy[n] = liquidation_opt_rate(t, 0.0, 1.0, p);
    cs[n] = liquidation_opt_rate(t, 1.0, 0.0, p);
  }
  auto fn = [p, cy = std::move(cy), cs = std::move(cs)](int n, const Vec& z) {
    const double t = p.grid.node(n);
    return cy[n] * z[1] + cs[n] * liquidation_price(t, z[0], p);
  };
  return std::make_unique<ClosedFormPolicy>(fn, make_interval(p.a_lo, p.a_hi));
}

std::unique_ptr<Policy> liquidation_bench_policy(const LiquidationParams& p) {
  return std::make_unique<ConstantRatePolicy>(-p.y0 / p.grid.horizon);
}

// ---------------------------------------------------------------------------
// Selection
// ---------------------------------------------------------------------------
DiscreteProblem selection_problem(const SelectionParams& p) {
  DiscreteProblem prob;
  prob.dim = 2;
  prob.sense = Sense::Maximize;
  prob.grid = p.grid;
  prob.controls = make_interval(p.a_lo, p.a_hi);
  prob.z0 = Vec{0.0, p.x0};
  const double sigma = p.sigma;
  prob.drift = [](const Vec&, double) { return Vec{0.0, 0.0}; };
  prob.diffusion = [sigma](const Vec&, double a) { return Vec{1.0, sigma * a}; };
  GaussianPriorWeight gw{p.b0, p.gamma0, p.sigma};
  prob.running_cost = [](double, const Vec&, double) { return 0.0; };
  prob.terminal_cost = [p, gw](const Vec& z) {
    return -weight_F(p.grid.horizon, z[0], gw) * std::exp(-p.p * z[1]);
  };
  return prob;
}

DiscreteProblem selection_sampling_problem(const SelectionParams& p) {
  DiscreteProblem prob;
  prob.dim = 3;  // (w, x, beta)
  prob.sense = Sense::Maximize;
  prob.grid = p.grid;
  prob.controls = make_interval(p.a_lo, p.a_hi);
  prob.z0 = Vec{0.0, p.x0, p.b0};
  const double sigma = p.sigma;
  prob.drift = [sigma](const Vec& z, double a) { return Vec{z[2] / sigma, a * z[2], 0.0}; };
  prob.diffusion = [sigma](const Vec&, double a) { return Vec{1.0, sigma * a, 0.0}; };
  prob.running_cost = [](double, const Vec&, double) { return 0.0; };
  prob.terminal_cost = [p](const Vec& z) { return -std::exp(-p.p * z[1]); };
  prob.sample_initial = [p](const Vec& z0, RngStream& rng) {
    Vec z = z0;
    z[2] = p.b0 + p.gamma0 * rng.normal();
    return z;
  };
  return prob;
}

double selection_posterior_mean(double t, double w, const SelectionParams& p) {
  const double s2 = p.sigma * p.sigma;
  const double g2 = p.gamma0 * p.gamma0;
  // ln(S_t/S_0) + sigma^2 t / 2 = sigma w
  return (s2 * p.b0 + g2 * p.sigma * w) / (s2 + g2 * t);
}

double selection_opt_amount(double t, double w, const SelectionParams& p) {
  const double s2 = p.sigma * p.sigma;
  const double g2 = p.gamma0 * p.gamma0;
  const double T = p.grid.horizon;
  return (s2 + g2 * t) / (s2 + g2 * T) * selection_posterior_mean(t, w, p) / (p.p * s2);
}

std::unique_ptr<Policy> selection_opt_policy(const SelectionParams& p) {
  auto fn = [p](int n, const Vec& z) { return selection_opt_amount(p.grid.node(n), z[0], p); };
  return std::make_unique<ClosedFormPolicy>(fn, make_interval(p.a_lo, p.a_hi));
}

double selection_closed_form_value(const SelectionParams& p) {
  const double s2 = p.sigma * p.sigma;
  const double T = p.grid.horizon;
  const double d = s2 + p.gamma0 * p.gamma0 * T;
  const double inner = p.x0 +
                       (0.5 / p.p) * (std::log(d / s2) - p.gamma0 * p.gamma0 * T / d) +
                       (p.b0 * p.b0 / (2.0 * p.p * s2)) * (s2 * T / d);
  return -std::exp(-p.p * inner);
}

// ---------------------------------------------------------------------------
// Systemic risk
// ---------------------------------------------------------------------------
DiscreteProblem systemic_problem(const SystemicParams& p) {
  DiscreteProblem prob;
  prob.dim = 2;
  prob.sense = Sense::Minimize;
  prob.grid = p.grid;
  prob.controls = make_interval(p.a_lo, p.a_hi);
  prob.z0 = Vec{p.x0, p.y0};
  const double sig = p.sigma, rho = p.rho, kap = p.kappa;
  prob.drift = [sig, rho, kap](const Vec& z, double a) {
    return Vec{0.0, (sig * sig - 2.0 * (kap + a)) * z[1] +
                        sig * sig * (1.0 - rho * rho) * z[0] * z[0]};
  };
  prob.diffusion = [sig, rho](const Vec& z, double) {
    return Vec{sig * rho * z[0], 2.0 * rho * sig * z[1]};
  };
  prob.running_cost = [p](double, const Vec& z, double a) {
    return 0.5 * a * a + 0.5 * p.eta * z[1];
  };
  prob.terminal_cost = [p](const Vec& z) { return 0.5 * p.c * z[1]; };
  // reflecting boundary for the conditional variance
  prob.post_step = [](const Vec& z) {
    Vec out = z;
    out[1] = std::abs(out[1]);
    return out;
  };
  return prob;
}

PolynomialMkvSpec systemic_mkv_spec(const SystemicParams& p) {
  PolynomialMkvSpec spec;
  spec.degree = 2;
  spec.x0 = p.x0;
  const double kap = p.kappa, sig = p.sigma, rho = p.rho;
  spec.b0 = [kap](const Vec& m, double a) { return (kap + a) * m[0]; };
  spec.b1 = [kap](const Vec&, double a) { return -(kap + a); };
  spec.th0 = [](const Vec&, double) { return 0.0; };
  spec.th1 = [sig, rho](const Vec&, double) { return sig * std::sqrt(1.0 - rho * rho); };
  spec.g0c = [](const Vec&, double) { return 0.0; };
  spec.g1c = [sig, rho](const Vec&, double) { return sig * rho; };
  // costs in centered variables live on the direct problem; the raw-moment
  // spec carries the running control cost and variance penalties through the
  // moment identities  var = y2 - xbar^2
  const double eta = p.eta, c = p.c;
  spec.fk.resize(3);
  spec.fk[0] = [eta](const Vec& m, double a) {
    return 0.5 * a * a - 0.5 * eta * m[0] * m[0];
  };
  spec.fk[1] = [](const Vec&, double) { return 0.0; };
  spec.fk[2] = [eta](const Vec&, double) { return 0.5 * eta; };
  spec.gk.resize(3);
  spec.gk[0] = [c](const Vec& m) { return -0.5 * c * m[0] * m[0]; };
  spec.gk[1] = [](const Vec&) { return 0.0; };
  spec.gk[2] = [c](const Vec&) { return 0.5 * c; };
  return spec;
}

EmbeddingCrosscheck embedding_crosscheck_systemic(const SystemicParams& p, int n_samples,
                                                  std::uint64_t seed) {
  DiscreteProblem direct = systemic_problem(p);
  CenteredPair reduced = centered_from_raw(systemic_mkv_spec(p));

  EmbeddingCrosscheck rep;
  RngStream rng(seed, 0);
  for (int i = 0; i < n_samples; ++i) {
    Vec z{p.x0 * (0.5 + rng.uniform()), 2.0 * rng.uniform()};
    double a = p.a_lo + (p.a_hi - p.a_lo) * rng.uniform();
    Vec bd = direct.drift(z, a), br = reduced.drift(z, a);
    Vec sd = direct.diffusion(z, a), sr = reduced.diffusion(z, a);
    for (int k = 0; k < 2; ++k) {
      rep.max_drift_err = std::max(rep.max_drift_err, std::abs(bd[k] - br[k]));
      rep.max_diffusion_err = std::max(rep.max_diffusion_err, std::abs(sd[k] - sr[k]));
    }
  }

  // shared-noise Euler paths of both coefficient sets
  const int N = p.grid.steps;
  const double dt = p.grid.dt();
  const double sq = std::sqrt(dt);
  Vec zd{p.x0, std::max(p.y0, 0.1)}, zr = zd;
  RngStream noise(seed, 1);
  for (int n = 0; n < N; ++n) {
    const double a = p.a_lo + 0.3 * (p.a_hi - p.a_lo);
    const double eps = noise.normal();
    Vec bd = direct.drift(zd, a), sd = direct.diffusion(zd, a);
    Vec br = reduced.drift(zr, a), sr = reduced.diffusion(zr, a);
    for (int k = 0; k < 2; ++k) {
      zd[k] += bd[k] * dt + sd[k] * sq * eps;
      zr[k] += br[k] * dt + sr[k] * sq * eps;
    }
    for (int k = 0; k < 2; ++k)
      rep.max_path_err = std::max(rep.max_path_err, std::abs(zd[k] - zr[k]));
  }
  return rep;
}

std::vector<double> systemic_uncontrolled_variance(const SystemicParams& p) {
  const int N = p.grid.steps;
  const double dt = p.grid.dt();
  std::vector<double> y(N + 1);
  y[0] = p.y0;
  for (int n = 0; n < N; ++n)
    y[n + 1] = y[n] + ((p.sigma * p.sigma - 2.0 * p.kappa) * y[n] +
                       p.sigma * p.sigma * (1.0 - p.rho * p.rho) * p.x0 * p.x0) *
                          dt;
  return y;
}

}  // namespace mkv
