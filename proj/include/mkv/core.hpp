#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mkv/common.hpp"
#include "mkv/ctrlsearch.hpp"

namespace mkv {

// Uniform time grid t_n = n * dt, dt = horizon / steps.
struct TimeGrid {
  double horizon = 1.0;
  int steps = 1;

  TimeGrid() = default;
  TimeGrid(double T, int N) : horizon(T), steps(N) {
    if (!(T > 0.0) || N < 1) throw std::invalid_argument("TimeGrid: need T > 0 and N >= 1");
  }
  double dt() const { return horizon / steps; }
  double node(int n) const { return n * dt(); }
};

// A controlled scalar-noise diffusion on R^d with discrete-time costs:
//   Z' = Z + b(Z,a) dt + sigma0(Z,a) sqrt(dt) eps,   eps ~ N(0,1) scalar,
//   reward  sum_n f(t_n, Z_n, a_n) dt + g(Z_N),  optimized per `sense`.
// `post_step` (when set) transforms the state after each Euler step, e.g. a
// reflecting boundary. `sample_initial` (when set) draws the per-path start
// state; otherwise paths start at `z0`.
struct DiscreteProblem {
  int dim = 1;
  Sense sense = Sense::Maximize;
  TimeGrid grid;
  ControlSpace controls = Interval{0.0, 1.0};
  Vec z0;
  std::function<Vec(const Vec&, double)> drift;
  std::function<Vec(const Vec&, double)> diffusion;
  std::function<double(double, const Vec&, double)> running_cost;  // f(t, z, a)
  std::function<double(const Vec&)> terminal_cost;                 // g(z)
  std::function<Vec(const Vec&)> post_step;                        // optional
  std::function<Vec(const Vec&, RngStream&)> sample_initial;       // optional

  Vec initial_state(RngStream& rng) const {
    return sample_initial ? sample_initial(z0, rng) : z0;
  }
};

// One Euler transition G_dt(z, a, eps); applies the problem's post-step
// transform when present.
Vec euler_step(const Vec& z, double a, double eps, const DiscreteProblem& p);

// ---------------------------------------------------------------------------
// Policies: deterministic feedback rules (n, z) -> control in A.
// ---------------------------------------------------------------------------
class Policy {
 public:
  virtual ~Policy() = default;
  virtual double act(int n, const Vec& z) const = 0;
};

class ConstantRatePolicy final : public Policy {
 public:
  explicit ConstantRatePolicy(double rate) : rate_(rate) {}
  double act(int, const Vec&) const override { return rate_; }

 private:
  double rate_;
};

// Wraps an arbitrary feedback function; the result is clamped into `space`.
class ClosedFormPolicy final : public Policy {
 public:
  ClosedFormPolicy(std::function<double(int, const Vec&)> fn, ControlSpace space)
      : fn_(std::move(fn)), space_(std::move(space)) {}
  double act(int n, const Vec& z) const override { return clamp_control(space_, fn_(n, z)); }

 private:
  std::function<double(int, const Vec&)> fn_;
  ControlSpace space_;
};

// ---------------------------------------------------------------------------
// Forward simulation
// ---------------------------------------------------------------------------
struct PathSet {
  int n_paths = 0;
  int n_steps = 0;
  int dim = 0;
  std::vector<double> states;    // [m][n][k], n = 0..N
  std::vector<double> controls;  // [m][n],    n = 0..N-1
  std::vector<double> rewards;   // [m]
  std::vector<char> valid;       // [m]

  double state(int m, int n, int k) const {
    return states[(static_cast<std::size_t>(m) * (n_steps + 1) + n) * dim + k];
  }
  double control(int m, int n) const {
    return controls[static_cast<std::size_t>(m) * n_steps + n];
  }
};

struct ValueEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long n_paths = 0;
};

// Simulates M paths under `policy` starting from the problem's initial state,
// materializing states and controls. Paths hitting a non-finite state are
// flagged invalid; more than 0.1% invalid paths is an error.
PathSet simulate_paths(const DiscreteProblem& p, const Policy& policy, const Vec& z0, long n_paths,
                       std::uint64_t seed);

// Streaming Monte Carlo estimate of the policy value (no path storage). For
// sense=Maximize this is a statistical lower bound of the optimum; for
// Minimize an upper bound.
ValueEstimate evaluate_policy(const DiscreteProblem& p, const Policy& policy, const Vec& z0,
                              long n_paths, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Backward dynamic programming scaffold. A backend supplies per-layer
// evaluation points and the approximate conditional expectation operator;
// value iteration sweeps n = N-1..0 optimizing
//     V_n(z) = opt_a { f(t_n, z, a) dt + E-approx[ V_{n+1} | z, a ] }.
// ---------------------------------------------------------------------------
class CondExpBackend {
 public:
  virtual ~CondExpBackend() = default;
  virtual int layers() const = 0;                         // N
  virtual std::span<const Vec> points(int n) = 0;         // evaluation points at layer n
  // Build the layer-(n+1) representation from values at points(n+1).
  virtual void fit(int n, std::span<const double> values_next) = 0;
  // E-approx[ V_{n+1}(Z_{n+1}) | Z_n = z, a ] using the representation fit at n.
  virtual double cond_exp(int n, const Vec& z, double a) const = 0;
  // Optimal controls found at points(n) during the sweep; backends may record
  // them (grid tables) or ignore them (regression policies re-optimize).
  virtual void store_controls(int /*n*/, std::span<const double> /*controls*/) {}
  virtual std::unique_ptr<Policy> extract_policy(const DiscreteProblem& p,
                                                 const SearchSpec& spec) const = 0;
};

struct BackwardResult {
  std::unique_ptr<Policy> policy;
  std::vector<std::vector<double>> values;  // per layer, aligned with backend points
};

BackwardResult value_iteration_backward(const DiscreteProblem& p, CondExpBackend& backend,
                                        const SearchSpec& spec);

struct PerformanceIterationOptions {
  int resim_paths = 1;          // continuation samples per training point
  std::uint64_t seed = 0;
  long long budget = 400'000'000;  // cap on points * resim * remaining steps
};

// Performance iteration: the layer-(n+1) representation is fit on pathwise
// rewards-to-go re-simulated under the already-computed future controls, so no
// value surface is carried. Returns the policy only.
std::unique_ptr<Policy> performance_iteration_backward(const DiscreteProblem& p,
                                                       CondExpBackend& backend,
                                                       const SearchSpec& spec,
                                                       const PerformanceIterationOptions& opt);

}  // namespace mkv
