#pragma once

#include <memory>

#include "mkv/core.hpp"
#include "mkv/embedding.hpp"

namespace mkv {

// ---------------------------------------------------------------------------
// Gaussian-prior density weight
//   F(t,w) = sigma/sqrt(sigma^2+g0^2 t)
//            * exp((-b0^2 t + 2 b0 sigma w + g0^2 w^2) / (2(sigma^2+g0^2 t)))
// A positive martingale in w ~ N(0,t) with mean one.
// ---------------------------------------------------------------------------
struct GaussianPriorWeight {
  double b0 = 0.0;
  double gamma0 = 0.0;
  double sigma = 1.0;
};
double weight_F(double t, double w, const GaussianPriorWeight& params);

// Imaginary error function (2/sqrt(pi)) int_0^x exp(t^2) dt for |x| <= 6.
double erfi(double x);

// ---------------------------------------------------------------------------
// Inventory liquidation under drift uncertainty. Solver state (w, y):
// Brownian coordinate w with the price recovered as s(t,w), inventory y.
// Minimizes E[ sum F(t,w) a (s + gamma a) dt + F(T,w) eta y_T^2 ].
// ---------------------------------------------------------------------------
struct LiquidationParams {
  double gamma = 5.0;   // temporary impact
  double eta = 100.0;   // terminal inventory penalty
  double sigma = 0.4;
  double b0 = 0.1;      // prior drift mean
  double gamma0 = 0.1;  // prior drift std
  double s0 = 6.0;
  double y0 = 1.0;
  TimeGrid grid{1.0, 100};
  double a_lo = -5.0, a_hi = 1.0;
};

double liquidation_price(double t, double w, const LiquidationParams& p);
DiscreteProblem liquidation_problem(const LiquidationParams& p);
// Equivalent-value companion for forward evaluation: the drift is drawn from
// the prior per path and carried as a third state coordinate, and the costs
// drop the F weight. The weighted-measure estimator has unbounded variance
// for gamma0^2 T > sigma^2, this one does not.
DiscreteProblem liquidation_sampling_problem(const LiquidationParams& p);

// Closed-form optimal trading rate (continuous-time optimum applied at grid
// nodes); gamma0 = 0 falls back to the degenerate-prior limit.
double liquidation_opt_rate(double t, double s, double y, const LiquidationParams& p);
std::unique_ptr<Policy> liquidation_opt_policy(const LiquidationParams& p);
std::unique_ptr<Policy> liquidation_bench_policy(const LiquidationParams& p);  // rate -y0/T

// ---------------------------------------------------------------------------
// Portfolio selection under drift uncertainty, CARA utility. Solver state
// (w, x) with wealth x; maximizes E[-F(T,w) exp(-p x_T)].
// ---------------------------------------------------------------------------
struct SelectionParams {
  double p = 1.0;  // risk aversion
  double sigma = 0.4;
  double b0 = 0.1;
  double gamma0 = 0.5;
  double s0 = 6.0;
  double x0 = 0.0;
  TimeGrid grid{1.0, 100};
  double a_lo = -2.0, a_hi = 2.0;
};

DiscreteProblem selection_problem(const SelectionParams& p);
DiscreteProblem selection_sampling_problem(const SelectionParams& p);

// Posterior drift mean given the price/noise coordinate.
double selection_posterior_mean(double t, double w, const SelectionParams& p);
double selection_opt_amount(double t, double w, const SelectionParams& p);
std::unique_ptr<Policy> selection_opt_policy(const SelectionParams& p);
// Continuous-time optimal utility in closed form (logged alongside the Monte
// Carlo estimates; the two are reported separately in run logs).
double selection_closed_form_value(const SelectionParams& p);

// ---------------------------------------------------------------------------
// Interbank systemic risk with partial observation. State (xbar, y) with y
// the conditional variance; reflected Euler keeps y nonnegative. Minimizes
// E[ int (a^2/2 + eta/2 y) dt + c/2 y_T ].
// ---------------------------------------------------------------------------
struct SystemicParams {
  double kappa = 0.5;
  double sigma = 0.1;
  double rho = 0.5;
  double eta = 10.0;
  double c = 100.0;
  double x0 = 10.0;
  double y0 = 0.0;
  TimeGrid grid{1.0, 100};
  double a_lo = 0.0, a_hi = 10.0;
};

DiscreteProblem systemic_problem(const SystemicParams& p);

// Polynomial mean-field specification whose p=2 reduction reproduces the
// systemic dynamics after centering the second moment.
PolynomialMkvSpec systemic_mkv_spec(const SystemicParams& p);

// Crosscheck report: direct coefficients vs the centered raw-moment reduction
// at sampled points, plus shared-noise Euler paths of both parameterizations.
struct EmbeddingCrosscheck {
  double max_drift_err = 0.0;
  double max_diffusion_err = 0.0;
  double max_path_err = 0.0;
};
EmbeddingCrosscheck embedding_crosscheck_systemic(const SystemicParams& p, int n_samples,
                                                  std::uint64_t seed);

// Conditional-variance path of the uncontrolled deterministic moment flow,
// used to center the systemic state grids and training designs.
std::vector<double> systemic_uncontrolled_variance(const SystemicParams& p);

}  // namespace mkv
