#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mkv/core.hpp"

namespace mkv {

// ---------------------------------------------------------------------------
// Least squares. beta = (A + ridge I)^-1 (1/M) sum v_m phi(x_m) with
// A = (1/M) sum phi phi^T. Throws when the regularized covariance is
// ill-conditioned (> 1e12).
// ---------------------------------------------------------------------------
struct FitResult {
  std::vector<double> beta;
  double condition = 0.0;
};
FitResult fit_least_squares(const std::vector<std::vector<double>>& features,
                            std::span<const double> targets, double ridge);

// Default relative ridge: 1e-8 * trace(A)/K applied on top of A.
double default_ridge(const std::vector<std::vector<double>>& features);

// ---------------------------------------------------------------------------
// Monomial conditional expectations. One Euler step has the linear-Gaussian
// form Z' = m(z,a) + s(z,a) sqrt(dt) eps with a single scalar eps, so any
// monomial prod_k (Z'_k)^{j_k} has an exact expectation via binomial
// expansion and the Gaussian moments E[eps^j].
// ---------------------------------------------------------------------------
struct MultiIndex {
  std::vector<int> powers;  // one entry per state coordinate
  int total() const {
    int t = 0;
    for (int p : powers) t += p;
    return t;
  }
};

// All multi-indices on `dim` coordinates with total degree <= max_degree,
// graded colex order starting at the constant.
std::vector<MultiIndex> monomial_indices(int dim, int max_degree);

// E[ prod_k (Z'_k)^{j_k} | z, a ] for each requested monomial. Total degree
// above 8 is rejected. Ignores any post-step transform.
std::vector<double> monomial_cond_exp(const Vec& z, double a, const DiscreteProblem& p,
                                      std::span<const MultiIndex> monomials);

// ---------------------------------------------------------------------------
// Basis families
// ---------------------------------------------------------------------------

// State basis for the regress-later solver: each function carries its exact
// one-step conditional expectation phi_hat(n, z, a).
struct RlBasis {
  std::vector<std::function<double(const Vec&)>> value;
  std::vector<std::function<double(int, const Vec&, double)>> cond;
  std::vector<std::string> names;
  int size() const { return static_cast<int>(value.size()); }
};

// Monomials of total degree <= max_degree with automatic conditioning.
RlBasis monomial_rl_basis(const DiscreteProblem& p, int max_degree);

// State x control basis for control randomization.
struct CrBasis {
  std::vector<std::function<double(const Vec&, double)>> fns;
  std::vector<std::string> names;
  int size() const { return static_cast<int>(fns.size()); }
};

// Monomials in (z, a) of total degree <= max_degree.
CrBasis monomial_cr_basis(int dim, int max_degree);

// ---------------------------------------------------------------------------
// Training point design: a per-layer sampler plus the sample count.
// ---------------------------------------------------------------------------
struct TrainingDesign {
  std::function<Vec(int n, RngStream&)> sample;
  int count = 0;
};

TrainingDesign normal_design(std::function<Vec(double t)> mean, std::function<Vec(double t)> sd,
                             const TimeGrid& grid, int count);
TrainingDesign uniform_design(std::function<Vec(double t)> lo, std::function<Vec(double t)> hi,
                              const TimeGrid& grid, int count);
// Resamples (with jitter) from per-layer state clouds, e.g. previous-run paths.
TrainingDesign empirical_design(std::vector<std::vector<Vec>> cloud, double jitter, int count);

// ---------------------------------------------------------------------------
// Regress-later backend and solver
// ---------------------------------------------------------------------------
struct RegressionOptions {
  double ridge_rel = 1e-8;    // ridge = ridge_rel * trace(A)/K
  bool shared_covariance = false;  // estimate one covariance matrix for all steps
  std::uint64_t seed = 0;
};

class RlBackend final : public CondExpBackend {
 public:
  RlBackend(const DiscreteProblem& p, RlBasis basis, TrainingDesign design,
            RegressionOptions options);

  int layers() const override;
  std::span<const Vec> points(int n) override;
  void fit(int n, std::span<const double> values_next) override;
  double cond_exp(int n, const Vec& z, double a) const override;
  std::unique_ptr<Policy> extract_policy(const DiscreteProblem& p,
                                         const SearchSpec& spec) const override;

  const std::vector<std::vector<double>>& coefficients() const { return beta_; }
  const std::vector<double>& condition_numbers() const { return cond_; }

 private:
  const DiscreteProblem& p_;
  RlBasis basis_;
  TrainingDesign design_;
  RegressionOptions opt_;
  std::vector<std::vector<Vec>> points_;  // drawn lazily per layer
  std::vector<std::vector<double>> beta_;  // beta_[n]: regression fit at layer n+1
  std::vector<double> cond_;
  std::vector<std::vector<double>> shared_cov_;  // inverse covariance cache when shared
  double shared_cond_ = 0.0;
};

struct RegressionRun {
  std::unique_ptr<Policy> policy;
  std::vector<std::vector<double>> coefficients;  // per step
  std::vector<double> condition_numbers;
  std::vector<std::vector<double>> values;  // per layer at training points
};

RegressionRun rl_backward(const DiscreteProblem& p, const RlBasis& basis,
                          const TrainingDesign& design, const SearchSpec& spec,
                          const RegressionOptions& options = {});

// ---------------------------------------------------------------------------
// Control randomization backend and solver
// ---------------------------------------------------------------------------
struct Randomization {
  std::function<double(int n, RngStream&)> sample;  // exogenous control draw
  int paths = 0;
};

class CrBackend final : public CondExpBackend {
 public:
  CrBackend(const DiscreteProblem& p, CrBasis basis, Randomization randomization,
            RegressionOptions options);

  int layers() const override;
  std::span<const Vec> points(int n) override;
  void fit(int n, std::span<const double> values_next) override;
  double cond_exp(int n, const Vec& z, double a) const override;
  std::unique_ptr<Policy> extract_policy(const DiscreteProblem& p,
                                         const SearchSpec& spec) const override;

  const std::vector<std::vector<double>>& coefficients() const { return beta_; }
  // forward-cloud coverage warning: evaluation start state outside the
  // per-coordinate min/max of the training cloud
  bool covers(const Vec& z) const;

 private:
  const DiscreteProblem& p_;
  CrBasis basis_;
  RegressionOptions opt_;
  std::vector<std::vector<Vec>> states_;     // [n][m]
  std::vector<std::vector<double>> ctrls_;   // [n][m]
  std::vector<std::vector<double>> beta_;
  std::vector<double> cond_;
};

RegressionRun cr_backward(const DiscreteProblem& p, const CrBasis& basis,
                          const Randomization& randomization, const SearchSpec& spec,
                          const RegressionOptions& options = {});

// ---------------------------------------------------------------------------
// Explore first, exploit later: round 1 runs the base design, later rounds
// retrain on points (RL) or control distributions (CR) harvested from forward
// simulations under the previous round's policy.
// ---------------------------------------------------------------------------
struct ExploreExploitOptions {
  int rounds = 1;
  int harvest_paths = 2000;
  double jitter = 0.05;  // relative perturbation of the harvested cloud
  std::uint64_t seed = 0;
};

std::unique_ptr<Policy> rl_explore_exploit(const DiscreteProblem& p, const RlBasis& basis,
                                           const TrainingDesign& base_design,
                                           const SearchSpec& spec, const RegressionOptions& ropt,
                                           const ExploreExploitOptions& opt);

std::unique_ptr<Policy> cr_explore_exploit(const DiscreteProblem& p, const CrBasis& basis,
                                           const Randomization& base, const SearchSpec& spec,
                                           const RegressionOptions& ropt,
                                           const ExploreExploitOptions& opt);

// Coefficient dump (step, basis index, basis descriptor, beta) for persistence.
void save_coefficients_csv(const std::vector<std::vector<double>>& beta,
                           const std::vector<std::string>& names, const std::string& path);

}  // namespace mkv
