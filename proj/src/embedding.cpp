#include "mkv/embedding.hpp"

#include <cmath>

namespace mkv {

namespace {

void validate(const PolynomialMkvSpec& spec) {
  if (spec.degree < 2) throw std::invalid_argument("polynomial embedding requires degree p >= 2");
  if (spec.degree > Vec::kMaxDim)
    throw std::invalid_argument("polynomial embedding supports degree p <= 8");
  if (static_cast<int>(spec.fk.size()) != spec.degree + 1 ||
      static_cast<int>(spec.gk.size()) != spec.degree + 1)
    throw std::invalid_argument("polynomial embedding: need p+1 cost coefficient functions");
}

// y^j with the conventions y^0 = 1, y^1 = xbar, y^k = z[k-1] for k >= 2
inline double ypow(const Vec& z, int j) {
  if (j == 0) return 1.0;
  if (j == 1) return z[0];
  return z[j - 1];
}

Vec reduced_drift(const PolynomialMkvSpec& spec, const Vec& z, double a) {
  const int p = spec.degree;
  const double b0 = spec.b0(z, a), b1 = spec.b1(z, a);
  const double th0 = spec.th0(z, a), th1 = spec.th1(z, a);
  const double g0 = spec.g0c(z, a), g1 = spec.g1c(z, a);
  Vec out = Vec::zeros(p);
  out[0] = b0 + b1 * z[0];
  for (int k = 2; k <= p; ++k) {
    const double kk = k * (k - 1);
    out[k - 1] = k * b0 * ypow(z, k - 1) + k * b1 * ypow(z, k) +
                 0.5 * kk * (th0 * th0 + g0 * g0) * ypow(z, k - 2) +
                 0.5 * kk * (th1 * th1 + g1 * g1) * ypow(z, k) +
                 kk * (th0 * th1 + g0 * g1) * ypow(z, k - 1);
  }
  return out;
}

Vec reduced_diffusion(const PolynomialMkvSpec& spec, const Vec& z, double a) {
  const int p = spec.degree;
  const double g0 = spec.g0c(z, a), g1 = spec.g1c(z, a);
  Vec out = Vec::zeros(p);
  out[0] = g0 + g1 * z[0];
  for (int k = 2; k <= p; ++k) out[k - 1] = k * (g0 * ypow(z, k - 1) + g1 * ypow(z, k));
  return out;
}

inline double signed_moment(double x, int k, bool absolute) {
  double v = 1.0;
  for (int r = 0; r < k; ++r) v *= x;
  if (absolute && (k % 2 == 1)) v = std::abs(v);
  return v;
}

}  // namespace

DiscreteProblem reduce(const PolynomialMkvSpec& spec, const TimeGrid& grid,
                       const ControlSpace& controls) {
  validate(spec);
  const int p = spec.degree;

  DiscreteProblem prob;
  prob.dim = p;
  prob.sense = Sense::Maximize;
  prob.grid = grid;
  prob.controls = controls;
  prob.z0 = Vec::zeros(p);
  prob.z0[0] = spec.x0;
  for (int k = 2; k <= p; ++k) prob.z0[k - 1] = signed_moment(spec.x0, k, spec.absolute_odd_moments);

  prob.drift = [spec](const Vec& z, double a) { return reduced_drift(spec, z, a); };
  prob.diffusion = [spec](const Vec& z, double a) { return reduced_diffusion(spec, z, a); };
  prob.running_cost = [spec, p](double, const Vec& z, double a) {
    double acc = 0.0;
    for (int k = 0; k <= p; ++k) acc += spec.fk[k](z, a) * ypow(z, k);
    return acc;
  };
  prob.terminal_cost = [spec, p](const Vec& z) {
    double acc = 0.0;
    for (int k = 0; k <= p; ++k) acc += spec.gk[k](z) * ypow(z, k);
    return acc;
  };
  return prob;
}

std::vector<Vec> particle_oracle(const PolynomialMkvSpec& spec,
                                 const std::function<double(int)>& control_path, int n_particles,
                                 const TimeGrid& grid, std::uint64_t seed) {
  validate(spec);
  if (n_particles < 100)
    throw std::invalid_argument("particle_oracle: need at least 100 particles");
  const int p = spec.degree;
  const int N = grid.steps;
  const double dt = grid.dt();
  const double sq = std::sqrt(dt);

  std::vector<double> x(n_particles, spec.x0);
  auto empirical = [&]() {
    Vec m = Vec::zeros(p);
    double s1 = 0.0;
    std::vector<double> sk(p + 1, 0.0);
    for (double xi : x) {
      s1 += xi;
      for (int k = 2; k <= p; ++k) sk[k] += signed_moment(xi, k, spec.absolute_odd_moments);
    }
    m[0] = s1 / n_particles;
    for (int k = 2; k <= p; ++k) m[k - 1] = sk[k] / n_particles;
    return m;
  };

  RngStream common(seed, 0);
  std::vector<RngStream> idio;
  idio.reserve(n_particles);
  for (int i = 0; i < n_particles; ++i) idio.emplace_back(seed, 1 + static_cast<std::uint64_t>(i));

  std::vector<Vec> out;
  out.reserve(N + 1);
  out.push_back(empirical());
  for (int n = 0; n < N; ++n) {
    const double a = control_path(n);
    const Vec m = empirical();
    const double b0 = spec.b0(m, a), b1 = spec.b1(m, a);
    const double th0 = spec.th0(m, a), th1 = spec.th1(m, a);
    const double g0 = spec.g0c(m, a), g1 = spec.g1c(m, a);
    const double eps0 = common.normal();
    parallel_for(n_particles, [&](std::int64_t i) {
      const double v = x[i];
      x[i] = v + (b0 + b1 * v) * dt + (th0 + th1 * v) * sq * idio[i].normal() +
             (g0 + g1 * v) * sq * eps0;
    });
    out.push_back(empirical());
  }
  return out;
}

std::vector<Vec> reduced_moment_path(const PolynomialMkvSpec& spec,
                                     const std::function<double(int)>& control_path,
                                     const TimeGrid& grid, std::uint64_t seed) {
  validate(spec);
  const int p = spec.degree;
  const int N = grid.steps;
  const double dt = grid.dt();
  const double sq = std::sqrt(dt);
  Vec z = Vec::zeros(p);
  z[0] = spec.x0;
  for (int k = 2; k <= p; ++k) z[k - 1] = signed_moment(spec.x0, k, spec.absolute_odd_moments);

  RngStream common(seed, 0);
  std::vector<Vec> out;
  out.reserve(N + 1);
  out.push_back(z);
  for (int n = 0; n < N; ++n) {
    const double a = control_path(n);
    Vec b = reduced_drift(spec, z, a);
    Vec s = reduced_diffusion(spec, z, a);
    const double eps0 = common.normal();
    for (int k = 0; k < p; ++k) z[k] += b[k] * dt + s[k] * sq * eps0;
    out.push_back(z);
  }
  return out;
}

CenteredPair centered_from_raw(const PolynomialMkvSpec& spec) {
  validate(spec);
  if (spec.degree != 2)
    throw std::invalid_argument("centered_from_raw: defined for the p=2 embedding");
  CenteredPair out;
  out.drift = [spec](const Vec& zc, double a) {
    Vec raw{zc[0], zc[1] + zc[0] * zc[0]};
    Vec b = reduced_drift(spec, raw, a);
    Vec s = reduced_diffusion(spec, raw, a);
    // Ito: d(var) = dy2 - 2 xbar dxbar - d<xbar>
    return Vec{b[0], b[1] - 2.0 * zc[0] * b[0] - s[0] * s[0]};
  };
  out.diffusion = [spec](const Vec& zc, double a) {
    Vec raw{zc[0], zc[1] + zc[0] * zc[0]};
    Vec s = reduced_diffusion(spec, raw, a);
    return Vec{s[0], s[1] - 2.0 * zc[0] * s[0]};
  };
  return out;
}

}  // namespace mkv
