#include "mkv/core.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

namespace mkv {

Vec euler_step(const Vec& z, double a, double eps, const DiscreteProblem& p) {
  const double dt = p.grid.dt();
  const double sq = std::sqrt(dt);
  Vec b = p.drift(z, a);
  Vec s = p.diffusion(z, a);
  Vec out = z;
  for (int k = 0; k < p.dim; ++k) out[k] = z[k] + b[k] * dt + s[k] * sq * eps;
  if (p.post_step) out = p.post_step(out);
  return out;
}

namespace {

struct PathOutcome {
  double reward = 0.0;
  bool valid = true;
};

template <typename OnStep>
PathOutcome run_path(const DiscreteProblem& p, const Policy& policy, const Vec& start,
                     RngStream& rng, OnStep&& on_step) {
  const int N = p.grid.steps;
  const double dt = p.grid.dt();
  Vec z = start;
  double reward = 0.0;
  for (int n = 0; n < N; ++n) {
    double a = policy.act(n, z);
    reward += p.running_cost(p.grid.node(n), z, a) * dt;
    z = euler_step(z, a, rng.normal(), p);
    on_step(n, z, a);
    if (!z.finite()) return {std::nan(""), false};
  }
  reward += p.terminal_cost(z);
  if (!std::isfinite(reward)) return {std::nan(""), false};
  return {reward, true};
}

void check_invalid_fraction(long invalid, long total) {
  if (invalid * 1000 > total) {  // > 0.1%
    std::ostringstream os;
    os << "simulation produced " << invalid << "/" << total
       << " invalid paths (above the 0.1% threshold)";
    throw std::runtime_error(os.str());
  }
}

}  // namespace

PathSet simulate_paths(const DiscreteProblem& p, const Policy& policy, const Vec& z0, long n_paths,
                       std::uint64_t seed) {
  if (n_paths < 1) throw std::invalid_argument("simulate_paths: need at least one path");
  const int N = p.grid.steps;
  PathSet out;
  out.n_paths = static_cast<int>(n_paths);
  out.n_steps = N;
  out.dim = p.dim;
  out.states.assign(static_cast<std::size_t>(n_paths) * (N + 1) * p.dim, 0.0);
  out.controls.assign(static_cast<std::size_t>(n_paths) * N, 0.0);
  out.rewards.assign(n_paths, 0.0);
  out.valid.assign(n_paths, 1);

  parallel_for(n_paths, [&](std::int64_t m) {
    RngStream rng(seed, static_cast<std::uint64_t>(m));
    Vec start = z0;
    if (p.sample_initial) start = p.sample_initial(z0, rng);
    auto put_state = [&](int n, const Vec& z) {
      std::size_t base = (static_cast<std::size_t>(m) * (N + 1) + n) * p.dim;
      for (int k = 0; k < p.dim; ++k) out.states[base + k] = z[k];
    };
    put_state(0, start);
    PathOutcome res = run_path(p, policy, start, rng, [&](int n, const Vec& z, double a) {
      put_state(n + 1, z);
      out.controls[static_cast<std::size_t>(m) * N + n] = a;
    });
    out.rewards[m] = res.reward;
    out.valid[m] = res.valid ? 1 : 0;
  });

  long invalid = 0;
  for (char v : out.valid)
    if (!v) ++invalid;
  check_invalid_fraction(invalid, n_paths);
  return out;
}

ValueEstimate evaluate_policy(const DiscreteProblem& p, const Policy& policy, const Vec& z0,
                              long n_paths, std::uint64_t seed) {
  if (n_paths < 1) throw std::invalid_argument("evaluate_policy: need at least one path");
  std::vector<double> rewards(n_paths);
  std::vector<char> valid(n_paths);
  parallel_for(n_paths, [&](std::int64_t m) {
    RngStream rng(seed, static_cast<std::uint64_t>(m));
    Vec start = z0;
    if (p.sample_initial) start = p.sample_initial(z0, rng);
    PathOutcome res = run_path(p, policy, start, rng, [](int, const Vec&, double) {});
    rewards[m] = res.reward;
    valid[m] = res.valid ? 1 : 0;
  });

  // sequential reduction so the estimate does not depend on thread count
  long invalid = 0;
  double sum = 0.0;
  long nv = 0;
  for (long m = 0; m < n_paths; ++m) {
    if (!valid[m]) {
      ++invalid;
      continue;
    }
    sum += rewards[m];
    ++nv;
  }
  check_invalid_fraction(invalid, n_paths);
  double mean = sum / nv;
  double ss = 0.0;
  for (long m = 0; m < n_paths; ++m) {
    if (!valid[m]) continue;
    double d = rewards[m] - mean;
    ss += d * d;
  }
  double sd = nv > 1 ? std::sqrt(ss / (nv - 1)) : 0.0;
  return {mean, sd / std::sqrt(static_cast<double>(nv)), nv};
}

BackwardResult value_iteration_backward(const DiscreteProblem& p, CondExpBackend& backend,
                                        const SearchSpec& spec) {
  const int N = backend.layers();
  if (N != p.grid.steps) throw std::invalid_argument("backend layers != problem steps");
  const double dt = p.grid.dt();

  BackwardResult res;
  res.values.resize(N + 1);

  {
    auto pts = backend.points(N);
    res.values[N].resize(pts.size());
    parallel_for(static_cast<std::int64_t>(pts.size()),
                 [&](std::int64_t i) { res.values[N][i] = p.terminal_cost(pts[i]); });
  }

  for (int n = N - 1; n >= 0; --n) {
    backend.fit(n, res.values[n + 1]);
    auto pts = backend.points(n);
    res.values[n].resize(pts.size());
    std::vector<double> controls(pts.size());
    std::exception_ptr search_err;
    std::atomic<bool> failed{false};
    parallel_for(static_cast<std::int64_t>(pts.size()), [&](std::int64_t i) {
      const Vec& z = pts[i];
      auto objective = [&](double a) {
        return p.running_cost(p.grid.node(n), z, a) * dt + backend.cond_exp(n, z, a);
      };
      SearchResult r = optimize(objective, p.controls, spec, p.sense);
      if (!std::isfinite(r.value)) {
        if (!failed.exchange(true)) {
          std::ostringstream os;
          os << "control search failed at step " << n << ", point " << i;
          search_err = std::make_exception_ptr(std::runtime_error(os.str()));
        }
        return;
      }
      res.values[n][i] = r.value;
      controls[i] = r.arg;
    });
    if (failed.load()) std::rethrow_exception(search_err);
    backend.store_controls(n, controls);
  }
  res.policy = backend.extract_policy(p, spec);
  return res;
}

namespace {

// realized reward-to-go from `z` at step n_from under the given per-layer
// policies (used by performance iteration)
double rollout(const DiscreteProblem& p, const std::vector<std::function<double(const Vec&)>>& acts,
               int n_from, Vec z, RngStream& rng) {
  const int N = p.grid.steps;
  const double dt = p.grid.dt();
  double reward = 0.0;
  for (int k = n_from; k < N; ++k) {
    double a = acts[k](z);
    reward += p.running_cost(p.grid.node(k), z, a) * dt;
    z = euler_step(z, a, rng.normal(), p);
    if (!z.finite()) return std::nan("");
  }
  return reward + p.terminal_cost(z);
}

}  // namespace

std::unique_ptr<Policy> performance_iteration_backward(const DiscreteProblem& p,
                                                       CondExpBackend& backend,
                                                       const SearchSpec& spec,
                                                       const PerformanceIterationOptions& opt) {
  const int N = backend.layers();
  if (N != p.grid.steps) throw std::invalid_argument("backend layers != problem steps");
  const double dt = p.grid.dt();

  {
    long long pts = 0;
    for (int n = 1; n <= N; ++n) pts += static_cast<long long>(backend.points(n).size()) * (N - n + 1);
    long long work = pts * std::max(1, opt.resim_paths);
    if (work > opt.budget) {
      std::ostringstream os;
      os << "performance iteration would re-simulate ~" << work
         << " path-steps, above the budget of " << opt.budget;
      throw std::runtime_error(os.str());
    }
  }

  // per-layer argmax closures over the fitted representations
  std::vector<std::function<double(const Vec&)>> acts(N);
  for (int n = N - 1; n >= 0; --n) {
    auto pts = backend.points(n + 1);
    std::vector<double> targets(pts.size());
    parallel_for(static_cast<std::int64_t>(pts.size()), [&](std::int64_t i) {
      double acc = 0.0;
      int R = std::max(1, opt.resim_paths);
      for (int r = 0; r < R; ++r) {
        RngStream rng(opt.seed ^ (0xA5A5A5A5ULL * (n + 1)), static_cast<std::uint64_t>(i) * R + r);
        if (n + 1 < N) {
          double v = rollout(p, acts, n + 1, pts[i], rng);
          acc += v;
        } else {
          acc += p.terminal_cost(pts[i]);
        }
      }
      targets[i] = acc / std::max(1, opt.resim_paths);
    });
    backend.fit(n, targets);
    const int level = n;
    acts[n] = [&p, &backend, &spec, level, dt](const Vec& z) {
      auto objective = [&](double a) {
        return p.running_cost(p.grid.node(level), z, a) * dt + backend.cond_exp(level, z, a);
      };
      return optimize(objective, p.controls, spec, p.sense).arg;
    };
    // controls at this layer's points, recorded for table-based backends
    auto own = backend.points(n);
    std::vector<double> controls(own.size());
    parallel_for(static_cast<std::int64_t>(own.size()),
                 [&](std::int64_t i) { controls[i] = acts[n](own[i]); });
    backend.store_controls(n, controls);
  }
  return backend.extract_policy(p, spec);
}

}  // namespace mkv
