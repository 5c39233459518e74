#include "mkv/regmc.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mkv {

FitResult fit_least_squares(const std::vector<std::vector<double>>& features,
                            std::span<const double> targets, double ridge) {
  const int M = static_cast<int>(features.size());
  if (M == 0) throw std::invalid_argument("fit_least_squares: no samples");
  const int K = static_cast<int>(features.front().size());
  if (M < K) throw std::invalid_argument("fit_least_squares: fewer samples than basis functions");
  if (static_cast<int>(targets.size()) != M)
    throw std::invalid_argument("fit_least_squares: targets/features size mismatch");
  if (ridge < 0.0) throw std::invalid_argument("fit_least_squares: negative ridge");

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(K, K);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(K);
  Eigen::VectorXd phi(K);
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < K; ++k) phi(k) = features[m][k];
    A.selfadjointView<Eigen::Lower>().rankUpdate(phi, 1.0);
    c += targets[m] * phi;
  }
  A = A.selfadjointView<Eigen::Lower>();
  A /= static_cast<double>(M);
  c /= static_cast<double>(M);
  A.diagonal().array() += ridge;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  const double cond = (lmin > 0.0) ? lmax / lmin : std::numeric_limits<double>::infinity();
  if (!(cond < 1e12)) {
    std::ostringstream os;
    os << "fit_least_squares: covariance condition number " << cond
       << " exceeds 1e12; increase the ridge or improve the training design";
    throw std::runtime_error(os.str());
  }

  Eigen::VectorXd beta = es.eigenvectors() *
                         (es.eigenvectors().transpose() * c).cwiseQuotient(es.eigenvalues());
  FitResult out;
  out.beta.assign(beta.data(), beta.data() + K);
  out.condition = cond;
  return out;
}

namespace {

// trace(A)/K of the sample covariance, the scale the relative ridge applies to
double covariance_trace_scale(const std::vector<std::vector<double>>& features) {
  if (features.empty()) return 0.0;
  const int K = static_cast<int>(features.front().size());
  double tr = 0.0;
  for (const auto& row : features)
    for (int k = 0; k < K; ++k) tr += row[k] * row[k];
  return tr / static_cast<double>(features.size()) / K;
}

}  // namespace

double default_ridge(const std::vector<std::vector<double>>& features) {
  return 1e-8 * covariance_trace_scale(features);
}

std::vector<MultiIndex> monomial_indices(int dim, int max_degree) {
  std::vector<MultiIndex> out;
  MultiIndex cur;
  cur.powers.assign(dim, 0);
  // graded order: all indices of total degree d before degree d+1
  std::function<void(int, int)> recd = [&](int coord, int remaining) {
    if (coord == dim - 1) {
      cur.powers[coord] = remaining;
      out.push_back(cur);
      cur.powers[coord] = 0;
      return;
    }
    for (int p = remaining; p >= 0; --p) {
      cur.powers[coord] = p;
      recd(coord + 1, remaining - p);
    }
    cur.powers[coord] = 0;
  };
  for (int d = 0; d <= max_degree; ++d) recd(0, d);
  return out;
}

namespace {

// expectation of prod_k (mean_k + c_k eps)^{j_k} over eps ~ N(0,1)
double gaussian_monomial_moment(const Vec& mean, const Vec& c, const MultiIndex& mi) {
  if (mi.total() > 8)
    throw std::invalid_argument("monomial_cond_exp: total degree above 8 rejected");
  std::array<double, 9> poly{};
  poly[0] = 1.0;
  int deg = 0;
  for (int k = 0; k < mean.size(); ++k) {
    for (int rep = 0; rep < mi.powers[k]; ++rep) {
      std::array<double, 9> next{};
      for (int d = 0; d <= deg; ++d) {
        next[d] += poly[d] * mean[k];
        next[d + 1] += poly[d] * c[k];
      }
      ++deg;
      poly = next;
    }
  }
  double e = 0.0;
  for (int d = 0; d <= deg; ++d) e += poly[d] * normal::moment(d);
  return e;
}

}  // namespace

std::vector<double> monomial_cond_exp(const Vec& z, double a, const DiscreteProblem& p,
                                      std::span<const MultiIndex> monomials) {
  const double dt = p.grid.dt();
  const double sq = std::sqrt(dt);
  Vec b = p.drift(z, a);
  Vec s = p.diffusion(z, a);
  Vec mean = z, c = z;
  for (int k = 0; k < p.dim; ++k) {
    mean[k] = z[k] + b[k] * dt;
    c[k] = s[k] * sq;
  }
  std::vector<double> out;
  out.reserve(monomials.size());
  for (const MultiIndex& mi : monomials) {
    if (static_cast<int>(mi.powers.size()) != p.dim)
      throw std::invalid_argument("monomial_cond_exp: index dimension mismatch");
    out.push_back(gaussian_monomial_moment(mean, c, mi));
  }
  return out;
}

RlBasis monomial_rl_basis(const DiscreteProblem& p, int max_degree) {
  RlBasis basis;
  auto idx = monomial_indices(p.dim, max_degree);
  // captured by value so policies may outlive the problem object
  auto drift = p.drift;
  auto diffusion = p.diffusion;
  const double dt = p.grid.dt();
  const int dim = p.dim;
  for (const MultiIndex& mi : idx) {
    basis.value.push_back([mi](const Vec& z) {
      double v = 1.0;
      for (std::size_t k = 0; k < mi.powers.size(); ++k)
        for (int r = 0; r < mi.powers[k]; ++r) v *= z[static_cast<int>(k)];
      return v;
    });
    basis.cond.push_back([mi, drift, diffusion, dt, dim](int, const Vec& z, double a) {
      Vec b = drift(z, a);
      Vec s = diffusion(z, a);
      Vec mean = z, c = z;
      const double sq = std::sqrt(dt);
      for (int k = 0; k < dim; ++k) {
        mean[k] = z[k] + b[k] * dt;
        c[k] = s[k] * sq;
      }
      return gaussian_monomial_moment(mean, c, mi);
    });
    std::ostringstream nm;
    nm << "z^(";
    for (std::size_t k = 0; k < mi.powers.size(); ++k) nm << (k ? "," : "") << mi.powers[k];
    nm << ")";
    basis.names.push_back(nm.str());
  }
  return basis;
}

CrBasis monomial_cr_basis(int dim, int max_degree) {
  CrBasis basis;
  auto idx = monomial_indices(dim + 1, max_degree);  // last coordinate is the control
  for (const MultiIndex& mi : idx) {
    basis.fns.push_back([mi, dim](const Vec& z, double a) {
      double v = 1.0;
      for (int k = 0; k < dim; ++k)
        for (int r = 0; r < mi.powers[k]; ++r) v *= z[k];
      for (int r = 0; r < mi.powers[dim]; ++r) v *= a;
      return v;
    });
    std::ostringstream nm;
    nm << "z^(";
    for (int k = 0; k < dim; ++k) nm << (k ? "," : "") << mi.powers[k];
    nm << ")*a^" << mi.powers[dim];
    basis.names.push_back(nm.str());
  }
  return basis;
}

TrainingDesign normal_design(std::function<Vec(double t)> mean, std::function<Vec(double t)> sd,
                             const TimeGrid& grid, int count) {
  TrainingDesign d;
  d.count = count;
  d.sample = [mean = std::move(mean), sd = std::move(sd), grid](int n, RngStream& rng) {
    double t = grid.node(n);
    Vec m = mean(t), s = sd(t);
    Vec z = m;
    for (int k = 0; k < m.size(); ++k) z[k] = m[k] + s[k] * rng.normal();
    return z;
  };
  return d;
}

TrainingDesign uniform_design(std::function<Vec(double t)> lo, std::function<Vec(double t)> hi,
                              const TimeGrid& grid, int count) {
  TrainingDesign d;
  d.count = count;
  d.sample = [lo = std::move(lo), hi = std::move(hi), grid](int n, RngStream& rng) {
    double t = grid.node(n);
    Vec l = lo(t), h = hi(t);
    Vec z = l;
    for (int k = 0; k < l.size(); ++k) z[k] = l[k] + (h[k] - l[k]) * rng.uniform();
    return z;
  };
  return d;
}

TrainingDesign empirical_design(std::vector<std::vector<Vec>> cloud, double jitter, int count) {
  if (cloud.empty()) throw std::invalid_argument("empirical_design: empty cloud");
  // per-layer, per-coordinate spread for the jitter scale
  std::vector<Vec> spread(cloud.size());
  for (std::size_t n = 0; n < cloud.size(); ++n) {
    if (cloud[n].empty()) throw std::invalid_argument("empirical_design: empty cloud layer");
    const int d = cloud[n].front().size();
    Vec lo = cloud[n].front(), hi = cloud[n].front();
    for (const Vec& z : cloud[n])
      for (int k = 0; k < d; ++k) {
        lo[k] = std::min(lo[k], z[k]);
        hi[k] = std::max(hi[k], z[k]);
      }
    spread[n] = lo;
    for (int k = 0; k < d; ++k) spread[n][k] = hi[k] - lo[k];
  }
  TrainingDesign d;
  d.count = count;
  d.sample = [cloud = std::move(cloud), spread = std::move(spread), jitter](int n, RngStream& rng) {
    std::size_t layer = std::min<std::size_t>(n, cloud.size() - 1);
    const auto& pts = cloud[layer];
    std::size_t pick = static_cast<std::size_t>(rng.uniform() * pts.size());
    if (pick >= pts.size()) pick = pts.size() - 1;
    Vec z = pts[pick];
    for (int k = 0; k < z.size(); ++k) z[k] += jitter * spread[layer][k] * rng.normal();
    return z;
  };
  return d;
}

// ---------------------------------------------------------------------------
// Regression policy shared by both solvers
// ---------------------------------------------------------------------------
namespace {

class RegressionPolicy final : public Policy {
 public:
  RegressionPolicy(std::function<double(int, const Vec&, double)> q_tail,
                   std::function<double(double, const Vec&, double)> running_cost, TimeGrid grid,
                   ControlSpace space, SearchSpec spec, Sense sense)
      : q_tail_(std::move(q_tail)),
        running_cost_(std::move(running_cost)),
        grid_(grid),
        space_(std::move(space)),
        spec_(spec),
        sense_(sense) {}

  double act(int n, const Vec& z) const override {
    const double dt = grid_.dt();
    auto objective = [&](double a) {
      return running_cost_(grid_.node(n), z, a) * dt + q_tail_(n, z, a);
    };
    return clamp_control(space_, optimize(objective, space_, spec_, sense_).arg);
  }

 private:
  std::function<double(int, const Vec&, double)> q_tail_;
  std::function<double(double, const Vec&, double)> running_cost_;
  TimeGrid grid_;
  ControlSpace space_;
  SearchSpec spec_;
  Sense sense_;
};

std::vector<std::vector<double>> feature_matrix_rl(const RlBasis& basis,
                                                   std::span<const Vec> pts) {
  std::vector<std::vector<double>> X(pts.size(), std::vector<double>(basis.size()));
  for (std::size_t m = 0; m < pts.size(); ++m)
    for (int k = 0; k < basis.size(); ++k) X[m][k] = basis.value[k](pts[m]);
  return X;
}

}  // namespace

// ---------------------------------------------------------------------------
// RlBackend
// ---------------------------------------------------------------------------
RlBackend::RlBackend(const DiscreteProblem& p, RlBasis basis, TrainingDesign design,
                     RegressionOptions options)
    : p_(p), basis_(std::move(basis)), design_(std::move(design)), opt_(options) {
  if (design_.count < basis_.size())
    throw std::invalid_argument("regress-later: training count below basis size");
  const int N = p.grid.steps;
  points_.resize(N + 1);
  beta_.resize(N);
  cond_.assign(N, 0.0);
}

int RlBackend::layers() const { return p_.grid.steps; }

std::span<const Vec> RlBackend::points(int n) {
  auto& pts = points_[n];
  if (pts.empty()) {
    if (n == 0 && !p_.sample_initial) {
      pts.push_back(p_.z0);
    } else {
      pts.resize(design_.count);
      RngStream rng(opt_.seed ^ 0x52C0FFEEULL, static_cast<std::uint64_t>(n));
      for (auto& z : pts) z = design_.sample(n, rng);
    }
  }
  return pts;
}

void RlBackend::fit(int n, std::span<const double> values_next) {
  auto pts = points(n + 1);
  auto X = feature_matrix_rl(basis_, pts);
  if (!opt_.shared_covariance) {
    double ridge = opt_.ridge_rel * covariance_trace_scale(X);
    FitResult fr = fit_least_squares(X, values_next, ridge);
    beta_[n] = std::move(fr.beta);
    cond_[n] = fr.condition;
    return;
  }
  // single covariance estimate shared across steps (stationary design); the
  // cross-moment vector is refreshed per step
  const int K = basis_.size();
  const int M = static_cast<int>(X.size());
  if (shared_cov_.empty()) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(K, K);
    Eigen::VectorXd phi(K);
    for (int m = 0; m < M; ++m) {
      for (int k = 0; k < K; ++k) phi(k) = X[m][k];
      A.selfadjointView<Eigen::Lower>().rankUpdate(phi, 1.0);
    }
    A = A.selfadjointView<Eigen::Lower>();
    A /= static_cast<double>(M);
    A.diagonal().array() += opt_.ridge_rel * covariance_trace_scale(X);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    const double lmin = es.eigenvalues().minCoeff();
    const double cond =
        lmin > 0.0 ? es.eigenvalues().maxCoeff() / lmin : std::numeric_limits<double>::infinity();
    if (!(cond < 1e12))
      throw std::runtime_error(
          "regress-later: shared covariance is ill-conditioned; increase the ridge or improve "
          "the training design");
    shared_cond_ = cond;
    shared_cov_.resize(K, std::vector<double>(K));
    Eigen::MatrixXd Ainv = es.eigenvectors() *
                           es.eigenvalues().cwiseInverse().asDiagonal() *
                           es.eigenvectors().transpose();
    for (int i = 0; i < K; ++i)
      for (int j = 0; j < K; ++j) shared_cov_[i][j] = Ainv(i, j);
  }
  std::vector<double> c(K, 0.0);
  for (int m = 0; m < M; ++m)
    for (int k = 0; k < K; ++k) c[k] += values_next[m] * X[m][k];
  for (int k = 0; k < K; ++k) c[k] /= M;
  beta_[n].assign(K, 0.0);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) beta_[n][i] += shared_cov_[i][j] * c[j];
  cond_[n] = shared_cond_;
}

double RlBackend::cond_exp(int n, const Vec& z, double a) const {
  const auto& b = beta_[n];
  double acc = 0.0;
  for (int k = 0; k < basis_.size(); ++k) acc += b[k] * basis_.cond[k](n, z, a);
  return acc;
}

std::unique_ptr<Policy> RlBackend::extract_policy(const DiscreteProblem& p,
                                                  const SearchSpec& spec) const {
  auto beta = beta_;
  auto basis = basis_;
  auto q_tail = [beta, basis](int n, const Vec& z, double a) {
    const auto& b = beta[n];
    double acc = 0.0;
    for (int k = 0; k < basis.size(); ++k) acc += b[k] * basis.cond[k](n, z, a);
    return acc;
  };
  return std::make_unique<RegressionPolicy>(q_tail, p.running_cost, p.grid, p.controls, spec,
                                            p.sense);
}

RegressionRun rl_backward(const DiscreteProblem& p, const RlBasis& basis,
                          const TrainingDesign& design, const SearchSpec& spec,
                          const RegressionOptions& options) {
  RlBackend backend(p, basis, design, options);
  BackwardResult r = value_iteration_backward(p, backend, spec);
  RegressionRun out;
  out.policy = std::move(r.policy);
  out.values = std::move(r.values);
  out.coefficients = backend.coefficients();
  out.condition_numbers = backend.condition_numbers();
  return out;
}

// ---------------------------------------------------------------------------
// CrBackend
// ---------------------------------------------------------------------------
CrBackend::CrBackend(const DiscreteProblem& p, CrBasis basis, Randomization randomization,
                     RegressionOptions options)
    : p_(p), basis_(std::move(basis)), opt_(options) {
  const int N = p.grid.steps;
  const int M = randomization.paths;
  if (M < basis_.size())
    throw std::invalid_argument("control randomization: fewer paths than basis functions");
  states_.assign(N + 1, std::vector<Vec>(M));
  ctrls_.assign(N, std::vector<double>(M));
  beta_.resize(N);
  cond_.assign(N, 0.0);

  parallel_for(M, [&](std::int64_t m) {
    RngStream rng(opt_.seed ^ 0xC0117011ULL, static_cast<std::uint64_t>(m));
    Vec z = p.initial_state(rng);
    states_[0][m] = z;
    for (int n = 0; n < N; ++n) {
      double a = clamp_control(p.controls, randomization.sample(n, rng));
      ctrls_[n][m] = a;
      z = euler_step(z, a, rng.normal(), p);
      if (!z.finite()) z = states_[n][m];  // freeze a blown-up training path
      states_[n + 1][m] = z;
    }
  });
}

int CrBackend::layers() const { return p_.grid.steps; }

std::span<const Vec> CrBackend::points(int n) { return states_[n]; }

void CrBackend::fit(int n, std::span<const double> values_next) {
  const int M = static_cast<int>(states_[n].size());
  std::vector<std::vector<double>> X(M, std::vector<double>(basis_.size()));
  for (int m = 0; m < M; ++m)
    for (int k = 0; k < basis_.size(); ++k) X[m][k] = basis_.fns[k](states_[n][m], ctrls_[n][m]);
  double ridge = opt_.ridge_rel * covariance_trace_scale(X);
  FitResult fr = fit_least_squares(X, values_next, ridge);
  beta_[n] = std::move(fr.beta);
  cond_[n] = fr.condition;
}

double CrBackend::cond_exp(int n, const Vec& z, double a) const {
  const auto& b = beta_[n];
  double acc = 0.0;
  for (int k = 0; k < basis_.size(); ++k) acc += b[k] * basis_.fns[k](z, a);
  return acc;
}

bool CrBackend::covers(const Vec& z) const {
  const auto& layer = states_[0];
  const int d = p_.dim;
  for (int k = 0; k < d; ++k) {
    double lo = layer.front()[k], hi = lo;
    for (const Vec& s : layer) {
      lo = std::min(lo, s[k]);
      hi = std::max(hi, s[k]);
    }
    if (z[k] < lo || z[k] > hi) return false;
  }
  return true;
}

std::unique_ptr<Policy> CrBackend::extract_policy(const DiscreteProblem& p,
                                                  const SearchSpec& spec) const {
  auto beta = beta_;
  auto basis = basis_;
  auto q_tail = [beta, basis](int n, const Vec& z, double a) {
    const auto& b = beta[n];
    double acc = 0.0;
    for (int k = 0; k < basis.size(); ++k) acc += b[k] * basis.fns[k](z, a);
    return acc;
  };
  return std::make_unique<RegressionPolicy>(q_tail, p.running_cost, p.grid, p.controls, spec,
                                            p.sense);
}

RegressionRun cr_backward(const DiscreteProblem& p, const CrBasis& basis,
                          const Randomization& randomization, const SearchSpec& spec,
                          const RegressionOptions& options) {
  CrBackend backend(p, basis, randomization, options);
  BackwardResult r = value_iteration_backward(p, backend, spec);
  RegressionRun out;
  out.policy = std::move(r.policy);
  out.values = std::move(r.values);
  out.coefficients = backend.coefficients();
  out.condition_numbers = backend.condition_numbers();
  return out;
}

// ---------------------------------------------------------------------------
// Explore first, exploit later
// ---------------------------------------------------------------------------
namespace {

std::vector<std::vector<Vec>> harvest_states(const DiscreteProblem& p, const Policy& policy,
                                             int n_paths, std::uint64_t seed) {
  PathSet ps = simulate_paths(p, policy, p.z0, n_paths, seed);
  std::vector<std::vector<Vec>> cloud(p.grid.steps + 1);
  for (int n = 0; n <= p.grid.steps; ++n) {
    cloud[n].reserve(n_paths);
    for (int m = 0; m < ps.n_paths; ++m) {
      if (!ps.valid[m]) continue;
      Vec z = Vec::zeros(p.dim);
      for (int k = 0; k < p.dim; ++k) z[k] = ps.state(m, n, k);
      cloud[n].push_back(z);
    }
    if (cloud[n].size() < 2) throw std::runtime_error("explore/exploit: harvested cloud collapsed");
  }
  return cloud;
}

void check_cloud_rank(const std::vector<std::vector<Vec>>& cloud, int needed) {
  for (const auto& layer : cloud) {
    std::vector<double> xs;
    xs.reserve(layer.size());
    for (const Vec& z : layer) xs.push_back(z[0]);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    if (static_cast<int>(xs.size()) < std::min<int>(needed, 2))
      throw std::runtime_error("explore/exploit: degenerate empirical cloud");
  }
}

}  // namespace

std::unique_ptr<Policy> rl_explore_exploit(const DiscreteProblem& p, const RlBasis& basis,
                                           const TrainingDesign& base_design,
                                           const SearchSpec& spec, const RegressionOptions& ropt,
                                           const ExploreExploitOptions& opt) {
  if (opt.rounds < 1) throw std::invalid_argument("explore/exploit: rounds >= 1 required");
  RegressionRun run = rl_backward(p, basis, base_design, spec, ropt);
  for (int r = 1; r < opt.rounds; ++r) {
    auto cloud = harvest_states(p, *run.policy, opt.harvest_paths, opt.seed + 101 * r);
    check_cloud_rank(cloud, basis.size());
    TrainingDesign design = empirical_design(std::move(cloud), opt.jitter, base_design.count);
    RegressionOptions ro = ropt;
    ro.seed = ropt.seed + 7919 * r;
    run = rl_backward(p, basis, design, spec, ro);
  }
  return std::move(run.policy);
}

std::unique_ptr<Policy> cr_explore_exploit(const DiscreteProblem& p, const CrBasis& basis,
                                           const Randomization& base, const SearchSpec& spec,
                                           const RegressionOptions& ropt,
                                           const ExploreExploitOptions& opt) {
  if (opt.rounds < 1) throw std::invalid_argument("explore/exploit: rounds >= 1 required");
  RegressionRun run = cr_backward(p, basis, base, spec, ropt);
  for (int r = 1; r < opt.rounds; ++r) {
    // realized controls under the current policy, perturbed and clamped into A
    PathSet ps = simulate_paths(p, *run.policy, p.z0, opt.harvest_paths, opt.seed + 211 * r);
    std::vector<std::vector<double>> ctrl(p.grid.steps);
    for (int n = 0; n < p.grid.steps; ++n) {
      for (int m = 0; m < ps.n_paths; ++m)
        if (ps.valid[m]) ctrl[n].push_back(ps.control(m, n));
      if (ctrl[n].size() < 2) throw std::runtime_error("explore/exploit: degenerate control cloud");
    }
    double width = space_hi(p.controls) - space_lo(p.controls);
    Randomization rnd;
    rnd.paths = base.paths;
    rnd.sample = [ctrl = std::move(ctrl), jitter = opt.jitter, width,
                  controls = p.controls](int n, RngStream& rng) {
      const auto& xs = ctrl[n];
      std::size_t pick = static_cast<std::size_t>(rng.uniform() * xs.size());
      if (pick >= xs.size()) pick = xs.size() - 1;
      return clamp_control(controls, xs[pick] + jitter * width * rng.normal());
    };
    RegressionOptions ro = ropt;
    ro.seed = ropt.seed + 6007 * r;
    run = cr_backward(p, basis, rnd, spec, ro);
  }
  return std::move(run.policy);
}

void save_coefficients_csv(const std::vector<std::vector<double>>& beta,
                           const std::vector<std::string>& names, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << "step,basis_index,basis,beta\n";
  f.precision(17);
  for (std::size_t n = 0; n < beta.size(); ++n)
    for (std::size_t k = 0; k < beta[n].size(); ++k)
      f << n << ',' << k << ',' << (k < names.size() ? names[k] : "") << ',' << beta[n][k] << '\n';
}

}  // namespace mkv
