#pragma once

#include <functional>
#include <vector>

#include "mkv/core.hpp"

namespace mkv {

// ---------------------------------------------------------------------------
// Scalar mean-field specification with affine state coefficients whose law
// dependence runs through the first p moments. Coefficient functions receive
// the moment vector (xbar, y2, ..., yp) and the control:
//   drift        b0 + b1 X
//   idio. vol    th0 + th1 X        (independent noise)
//   common vol   g0c + g1c X        (shared noise)
// Costs are sum_k f_k(moments, a) m_k and sum_k g_k(moments) m_k with the
// conventions m_0 = 1, m_1 = xbar, m_k = y_k.
// ---------------------------------------------------------------------------
using CoefFn = std::function<double(const Vec& moments, double a)>;
using CostFn = std::function<double(const Vec& moments, double a)>;
using TermFn = std::function<double(const Vec& moments)>;

struct PolynomialMkvSpec {
  int degree = 2;  // p >= 2
  CoefFn b0, b1, th0, th1, g0c, g1c;
  std::vector<CostFn> fk;  // size p+1 (k = 0..p)
  std::vector<TermFn> gk;  // size p+1
  double x0 = 0.0;
  // Moments are taken as signed x^k. The |x|^k variant is exposed for even/odd
  // checks but the shipped reductions run in regimes with positive states.
  bool absolute_odd_moments = false;
};

// Markov embedding: reduces the specification to a standard problem for the
// conditional moment vector (xbar, y2, ..., yp) in R^p driven by the common
// noise alone. Conventions y^0 = 1 and y^1 = xbar in the moment recursions.
DiscreteProblem reduce(const PolynomialMkvSpec& spec, const TimeGrid& grid,
                       const ControlSpace& controls);

// Interacting particle simulation of the underlying mean-field dynamics under
// an open-loop control path: all particles share one common-noise path and
// carry independent idiosyncratic noises; coefficients read the empirical
// moments. Returns the empirical moment vector per time node. Requires at
// least 100 particles.
std::vector<Vec> particle_oracle(const PolynomialMkvSpec& spec,
                                 const std::function<double(int)>& control_path, int n_particles,
                                 const TimeGrid& grid, std::uint64_t seed);

// Euler path of the reduced moment SDE under the same common-noise stream the
// particle oracle uses (stream id pairs with the oracle for path-by-path
// comparison).
std::vector<Vec> reduced_moment_path(const PolynomialMkvSpec& spec,
                                     const std::function<double(int)>& control_path,
                                     const TimeGrid& grid, std::uint64_t seed);

// For p=2: coefficient functions of the centered pair (xbar, var) obtained
// from the raw-moment reduction by the Ito change of variables
// var = y2 - xbar^2.
struct CenteredPair {
  std::function<Vec(const Vec&, double)> drift;      // (xbar, var) coordinates
  std::function<Vec(const Vec&, double)> diffusion;
};
CenteredPair centered_from_raw(const PolynomialMkvSpec& spec);

}  // namespace mkv
