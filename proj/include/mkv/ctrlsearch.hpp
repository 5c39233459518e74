#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "mkv/common.hpp"

namespace mkv {

// Control space: a closed interval or an explicit finite set.
struct Interval {
  double lo = 0.0, hi = 0.0;
};
struct FiniteSet {
  std::vector<double> values;  // stored sorted ascending, distinct
};
using ControlSpace = std::variant<Interval, FiniteSet>;

ControlSpace make_interval(double lo, double hi);
ControlSpace make_finite_set(std::vector<double> values);
double clamp_control(const ControlSpace& space, double a);
bool contains_control(const ControlSpace& space, double a, double tol = 1e-9);
double space_lo(const ControlSpace& space);
double space_hi(const ControlSpace& space);

enum class SearchMethod { Exhaustive, GoldenSection, BracketedParabolic, ClosedFormQuadratic };

struct SearchSpec {
  SearchMethod method = SearchMethod::BracketedParabolic;
  double tolerance = 1e-6;  // on the control argument
  int max_evaluations = 200;
  int multistart = 1;
};

struct SearchResult {
  double arg = 0.0;
  double value = 0.0;
  bool budget_exhausted = false;
};

// Scalar maximization of `objective` over `space`. Exhaustive search is exact
// on finite sets (ties broken toward the smaller control); bracketing methods
// assume approximate unimodality and return a point within `tolerance` of a
// local optimum, with `multistart` subinterval restarts as a safeguard.
SearchResult maximize(const std::function<double(double)>& objective, const ControlSpace& space,
                      const SearchSpec& spec);

// Same search driven by the problem sense (minimization negates internally,
// values are reported in the caller's sign convention).
SearchResult optimize(const std::function<double(double)>& objective, const ControlSpace& space,
                      const SearchSpec& spec, Sense sense);

// argmax over an interval of a |-> c0 + c1 a + c2 a^2.
// Concave: clamped vertex. Otherwise the better endpoint, ties toward lo.
double quadratic_argmax(double c0, double c1, double c2, const Interval& space);

}  // namespace mkv
