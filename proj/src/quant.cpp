#include "mkv/quant.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace mkv {

std::vector<double> Quantizer::boundaries() const {
  const int L = size();
  std::vector<double> m(L + 1);
  m[0] = -std::numeric_limits<double>::infinity();
  m[L] = std::numeric_limits<double>::infinity();
  for (int l = 1; l < L; ++l) m[l] = 0.5 * (points[l - 1] + points[l]);
  return m;
}

namespace {

// E[eps^2 1_{a<eps<b}] = Phi(b)-Phi(a) + a phi(a) - b phi(b), finite ends only
double second_moment_cell(double a, double b, double cdf_a, double cdf_b) {
  double lo = std::isfinite(a) ? a * normal::pdf(a) : 0.0;
  double hi = std::isfinite(b) ? b * normal::pdf(b) : 0.0;
  return (cdf_b - cdf_a) + lo - hi;
}

}  // namespace

Quantizer lloyd_gaussian(int L, double tol, int max_iter) {
  if (L < 1) throw std::invalid_argument("lloyd_gaussian: L >= 1 required");
  Quantizer q;
  q.points.resize(L);
  for (int l = 0; l < L; ++l) q.points[l] = normal::inv_cdf((l + 0.5) / L);

  std::vector<double> m(L + 1), cdf(L + 1), pdf(L + 1);
  double move = 0.0;
  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    m = q.boundaries();
    cdf[0] = 0.0;
    pdf[0] = 0.0;
    cdf[L] = 1.0;
    pdf[L] = 0.0;
    for (int l = 1; l < L; ++l) {
      cdf[l] = normal::cdf(m[l]);
      pdf[l] = normal::pdf(m[l]);
    }
    move = 0.0;
    for (int l = 0; l < L; ++l) {
      double w = cdf[l + 1] - cdf[l];
      double centroid = (pdf[l] - pdf[l + 1]) / w;
      move = std::max(move, std::abs(centroid - q.points[l]));
      q.points[l] = centroid;
    }
    if (move < tol) {
      converged = true;
      break;
    }
  }
  if (!converged && L > 1) {
    std::ostringstream os;
    os << "lloyd_gaussian: no convergence for L=" << L << " after " << max_iter
       << " iterations (last move " << move << ")";
    throw std::runtime_error(os.str());
  }

  m = q.boundaries();
  q.weights.resize(L);
  q.distortion = 0.0;
  double cprev = 0.0;
  for (int l = 0; l < L; ++l) {
    double cnext = (l == L - 1) ? 1.0 : normal::cdf(m[l + 1]);
    q.weights[l] = cnext - cprev;
    double e2 = second_moment_cell(m[l], m[l + 1], cprev, cnext);
    double pl = std::isfinite(m[l]) ? normal::pdf(m[l]) : 0.0;
    double ph = std::isfinite(m[l + 1]) ? normal::pdf(m[l + 1]) : 0.0;
    q.distortion += e2 - 2.0 * q.points[l] * (pl - ph) + q.points[l] * q.points[l] * q.weights[l];
    cprev = cnext;
  }
  return q;
}

Projection project(std::span<const double> grid, double x) {
  if (grid.empty()) throw std::invalid_argument("project: empty grid");
  auto it = std::lower_bound(grid.begin(), grid.end(), x);
  if (it == grid.begin()) return {0, grid[0]};
  if (it == grid.end()) {
    int i = static_cast<int>(grid.size()) - 1;
    return {i, grid[i]};
  }
  int hi = static_cast<int>(it - grid.begin());
  int lo = hi - 1;
  return (x - grid[lo] <= grid[hi] - x) ? Projection{lo, grid[lo]} : Projection{hi, grid[hi]};
}

Bracket interp_bracket(std::span<const double> grid, double x) {
  const int L = static_cast<int>(grid.size());
  if (L == 0) throw std::invalid_argument("interp_bracket: empty grid");
  if (x <= grid[0]) return {0, 0, 1.0};
  if (x >= grid[L - 1]) return {L - 1, L - 1, 1.0};
  auto it = std::lower_bound(grid.begin(), grid.end(), x);
  int hi = static_cast<int>(it - grid.begin());
  int lo = hi - 1;
  if (grid[hi] == grid[lo]) return {lo, lo, 1.0};
  return {lo, hi, (x - grid[lo]) / (grid[hi] - grid[lo])};
}

namespace {

void enforce_positive(std::vector<double>& pts) {
  // keep points strictly positive and strictly increasing
  double floor = 1e-10;
  for (auto& x : pts) {
    if (x <= floor) x = floor;
    floor = std::nextafter(x, std::numeric_limits<double>::infinity());
  }
}

}  // namespace

LayerGrids build_layer_grids(const TimeGrid& grid, std::span<const GridScheme> schemes,
                             const Quantizer& base, const Vec& z0,
                             std::span<const GridOptions> options) {
  const int d = static_cast<int>(schemes.size());
  if (d < 1 || d > 2) throw std::invalid_argument("build_layer_grids: 1 or 2 coordinates supported");
  const int N = grid.steps;
  LayerGrids out;
  out.dim = d;
  out.layers.resize(N + 1);
  for (int n = 0; n <= N; ++n) {
    const double t = grid.node(n);
    out.layers[n].resize(d);
    for (int k = 0; k < d; ++k) {
      std::vector<double>& pts = out.layers[n][k];
      if (n == 0) {
        pts = {z0[k]};
      } else if (const auto* bs = std::get_if<BrownianScaled>(&schemes[k])) {
        double r = bs->scale * (bs->sqrt_time ? std::sqrt(t) : t);
        pts.resize(base.size());
        for (int l = 0; l < base.size(); ++l) pts[l] = r * base.points[l];
      } else if (const auto* ce = std::get_if<Centered>(&schemes[k])) {
        double c = ce->center(t), r = ce->radius(t);
        pts.resize(base.size());
        for (int l = 0; l < base.size(); ++l) pts[l] = c + r * base.points[l];
      } else {
        const auto& emp = std::get<Empirical>(schemes[k]);
        if (n >= static_cast<int>(emp.points.size()) || emp.points[n].empty())
          throw std::invalid_argument("build_layer_grids: empirical scheme missing layer points");
        pts = emp.points[n];
        std::sort(pts.begin(), pts.end());
      }
      if (k < static_cast<int>(options.size()) && options[k].strictly_positive)
        enforce_positive(pts);
      if (pts.empty()) throw std::invalid_argument("build_layer_grids: empty layer grid");
    }
  }
  return out;
}

std::vector<std::vector<double>> empirical_layer_points(
    const std::vector<std::vector<double>>& cloud, int n_points) {
  std::vector<std::vector<double>> out(cloud.size());
  for (std::size_t n = 0; n < cloud.size(); ++n) {
    std::vector<double> xs = cloud[n];
    if (xs.empty()) throw std::invalid_argument("empirical_layer_points: empty cloud layer");
    std::sort(xs.begin(), xs.end());
    std::vector<double>& pts = out[n];
    pts.reserve(n_points);
    double prev = -std::numeric_limits<double>::infinity();
    for (int l = 0; l < n_points; ++l) {
      double u = (l + 0.5) / n_points;
      double x = xs[static_cast<std::size_t>(u * (xs.size() - 1))];
      if (x > prev) {
        pts.push_back(x);
        prev = x;
      }
    }
    if (pts.empty()) pts.push_back(xs.front());
  }
  return out;
}

namespace {

inline Vec one_step_mean(const DiscreteProblem& p, const Vec& z, double a) {
  Vec b = p.drift(z, a);
  Vec out = z;
  for (int k = 0; k < p.dim; ++k) out[k] = z[k] + b[k] * p.grid.dt();
  return out;
}

}  // namespace

double cond_exp_pc(const Vec& z, double a, std::span<const double> table, const Quantizer& quant,
                   const DiscreteProblem& problem, const LayerGrids& grids, int n_next) {
  const double dt = problem.grid.dt();
  const double sq = std::sqrt(dt);
  Vec m = one_step_mean(problem, z, a);
  Vec s = problem.diffusion(z, a);
  double acc = 0.0;
  for (int l = 0; l < quant.size(); ++l) {
    Vec zn = m;
    for (int k = 0; k < problem.dim; ++k) zn[k] += s[k] * sq * quant.points[l];
    if (problem.post_step) zn = problem.post_step(zn);
    std::size_t idx = 0;
    for (int k = 0; k < grids.dim; ++k) {
      auto g = grids.coord(n_next, k);
      idx = idx * g.size() + project(g, zn[k]).index;
    }
    acc += quant.weights[l] * table[idx];
  }
  return acc;
}

double cond_exp_semilinear(const Vec& z, double a, std::span<const double> table,
                           const Quantizer& quant, const DiscreteProblem& problem,
                           const LayerGrids& grids, int n_next, int interp_coord) {
  if (interp_coord < 0 || interp_coord >= grids.dim)
    throw std::invalid_argument("cond_exp_semilinear: bad interpolation coordinate");
  const double dt = problem.grid.dt();
  const double sq = std::sqrt(dt);
  Vec m = one_step_mean(problem, z, a);
  Vec s = problem.diffusion(z, a);
  double acc = 0.0;
  for (int l = 0; l < quant.size(); ++l) {
    Vec zn = m;
    for (int k = 0; k < problem.dim; ++k) zn[k] += s[k] * sq * quant.points[l];
    if (problem.post_step) zn = problem.post_step(zn);
    std::size_t base = 0;
    std::size_t stride_at_interp = 0;
    Bracket br{0, 0, 1.0};
    for (int k = 0; k < grids.dim; ++k) {
      auto g = grids.coord(n_next, k);
      if (k == interp_coord) {
        br = interp_bracket(g, zn[k]);
        stride_at_interp = 1;
        base = base * g.size() + br.lo;
      } else {
        base = base * g.size() + project(g, zn[k]).index;
      }
      if (k > interp_coord) stride_at_interp *= g.size();
    }
    double vlo = table[base];
    double vhi = table[base + static_cast<std::size_t>(br.hi - br.lo) * stride_at_interp];
    acc += quant.weights[l] * ((1.0 - br.lambda) * vlo + br.lambda * vhi);
  }
  return acc;
}

QuantBackend::QuantBackend(const DiscreteProblem& p, LayerGrids grids, Quantizer quant,
                           QuantInterp interp, int interp_coord)
    : p_(p),
      grids_(std::move(grids)),
      quant_(std::move(quant)),
      interp_(interp),
      interp_coord_(interp_coord) {
  if (grids_.dim != p.dim) throw std::invalid_argument("QuantBackend: grid dim != problem dim");
  const int N = p.grid.steps;
  if (grids_.n_layers() != N + 1) throw std::invalid_argument("QuantBackend: need N+1 grid layers");
  points_.resize(N + 1);
  tables_.resize(N + 1);
  control_tab_.resize(N);
  for (int n = 0; n <= N; ++n) {
    std::size_t sz = grids_.layer_size(n);
    points_[n].reserve(sz);
    if (grids_.dim == 1) {
      for (double x : grids_.layers[n][0]) points_[n].push_back(Vec{x});
    } else {
      for (double x : grids_.layers[n][0])
        for (double y : grids_.layers[n][1]) points_[n].push_back(Vec{x, y});
    }
  }
}

int QuantBackend::layers() const { return p_.grid.steps; }

std::span<const Vec> QuantBackend::points(int n) { return points_[n]; }

void QuantBackend::fit(int n, std::span<const double> values_next) {
  tables_[n + 1].assign(values_next.begin(), values_next.end());
  // boundary-hit accounting over the layer transition
  const double dt = p_.grid.dt();
  const double sq = std::sqrt(dt);
  for (const Vec& z : points_[n]) {
    double a = clamp_control(p_.controls, 0.0);
    Vec m = one_step_mean(p_, z, a);
    Vec s = p_.diffusion(z, a);
    for (int l = 0; l < quant_.size(); l += std::max(1, quant_.size() / 8)) {
      Vec zn = m;
      for (int k = 0; k < p_.dim; ++k) zn[k] += s[k] * sq * quant_.points[l];
      ++diag_.transitions;
      for (int k = 0; k < grids_.dim; ++k) {
        auto g = grids_.coord(n + 1, k);
        if (zn[k] < g.front() || zn[k] > g.back()) {
          ++diag_.boundary_hits;
          break;
        }
      }
    }
  }
}

double QuantBackend::cond_exp(int n, const Vec& z, double a) const {
  const auto& table = tables_[n + 1];
  if (interp_ == QuantInterp::PiecewiseConstant)
    return cond_exp_pc(z, a, table, quant_, p_, grids_, n + 1);
  return cond_exp_semilinear(z, a, table, quant_, p_, grids_, n + 1, interp_coord_);
}

void QuantBackend::store_controls(int n, std::span<const double> controls) {
  control_tab_[n].assign(controls.begin(), controls.end());
}

std::unique_ptr<Policy> QuantBackend::extract_policy(const DiscreteProblem& p,
                                                     const SearchSpec&) const {
  return std::make_unique<GridPolicy>(grids_, control_tab_, p.controls);
}

GridPolicy::GridPolicy(LayerGrids grids, std::vector<std::vector<double>> controls,
                       ControlSpace space)
    : grids_(std::move(grids)), controls_(std::move(controls)), space_(std::move(space)) {}

double GridPolicy::act(int n, const Vec& z) const {
  if (n < 0 || n >= static_cast<int>(controls_.size()))
    throw std::out_of_range("GridPolicy: step index outside the horizon");
  std::size_t idx = 0;
  for (int k = 0; k < grids_.dim; ++k) {
    auto g = grids_.coord(n, k);
    idx = idx * g.size() + project(g, z[k]).index;
  }
  return clamp_control(space_, controls_[n][idx]);
}

QBackwardResult q_backward(const DiscreteProblem& p, LayerGrids grids, const Quantizer& quant,
                           const SearchSpec& spec, QuantInterp interp, int interp_coord) {
  QuantBackend backend(p, std::move(grids), quant, interp, interp_coord);
  BackwardResult r = value_iteration_backward(p, backend, spec);
  QBackwardResult out;
  out.policy = std::move(r.policy);
  out.value_tables = std::move(r.values);
  out.diagnostics = backend.diagnostics();
  return out;
}

void save_quantizer_csv(const Quantizer& q, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  auto m = q.boundaries();
  f << "index,point,weight,lower,upper\n";
  f.precision(17);
  for (int l = 0; l < q.size(); ++l)
    f << l << ',' << q.points[l] << ',' << q.weights[l] << ',' << m[l] << ',' << m[l + 1] << '\n';
}

Quantizer load_quantizer_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(f, line);  // header
  Quantizer q;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream is(line);
    std::string tok;
    std::getline(is, tok, ',');  // index
    std::getline(is, tok, ',');
    q.points.push_back(std::stod(tok));
    std::getline(is, tok, ',');
    q.weights.push_back(std::stod(tok));
  }
  if (q.points.empty()) throw std::runtime_error("empty quantizer file: " + path);
  return q;
}

}  // namespace mkv
