#include "mkv/ctrlsearch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mkv {

ControlSpace make_interval(double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("control interval: lo > hi");
  return Interval{lo, hi};
}

ControlSpace make_finite_set(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("finite control set: empty");
  std::sort(values.begin(), values.end());
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] == values[i - 1]) throw std::invalid_argument("finite control set: duplicate value");
  return FiniteSet{std::move(values)};
}

double clamp_control(const ControlSpace& space, double a) {
  if (const auto* iv = std::get_if<Interval>(&space)) return std::clamp(a, iv->lo, iv->hi);
  const auto& vs = std::get<FiniteSet>(space).values;
  // nearest listed value, ties toward the smaller one
  auto it = std::lower_bound(vs.begin(), vs.end(), a);
  if (it == vs.begin()) return vs.front();
  if (it == vs.end()) return vs.back();
  double hi = *it, lo = *(it - 1);
  return (a - lo <= hi - a) ? lo : hi;
}

bool contains_control(const ControlSpace& space, double a, double tol) {
  if (const auto* iv = std::get_if<Interval>(&space)) return a >= iv->lo - tol && a <= iv->hi + tol;
  for (double v : std::get<FiniteSet>(space).values)
    if (std::abs(v - a) <= tol) return true;
  return false;
}

double space_lo(const ControlSpace& space) {
  if (const auto* iv = std::get_if<Interval>(&space)) return iv->lo;
  return std::get<FiniteSet>(space).values.front();
}

double space_hi(const ControlSpace& space) {
  if (const auto* iv = std::get_if<Interval>(&space)) return iv->hi;
  return std::get<FiniteSet>(space).values.back();
}

namespace {

struct Budget {
  int left;
  bool exhausted = false;
  double spend(const std::function<double(double)>& f, double x) {
    if (left <= 0) {
      exhausted = true;
      return -std::numeric_limits<double>::infinity();
    }
    --left;
    return f(x);
  }
};

// Golden-section ascent on [lo,hi]; returns best point seen.
SearchResult golden(const std::function<double(double)>& f, double lo, double hi, double tol,
                    Budget& budget) {
  static const double kInvPhi = 0.6180339887498948482;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = budget.spend(f, x1);
  double f2 = budget.spend(f, x2);
  while (b - a > tol && !budget.exhausted) {
    if (f1 > f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = budget.spend(f, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = budget.spend(f, x2);
    }
  }
  double xm = 0.5 * (a + b);
  double fm = budget.spend(f, xm);
  SearchResult r{xm, fm, budget.exhausted};
  if (f1 > r.value) r = {x1, f1, budget.exhausted};
  if (f2 > r.value) r = {x2, f2, budget.exhausted};
  return r;
}

// Brent-style bracketed search: golden-section steps with parabolic
// interpolation acceleration when the fit is trustworthy. Maximizes f.
SearchResult brent(const std::function<double(double)>& f, double lo, double hi, double tol,
                   Budget& budget) {
  static const double kCGold = 0.3819660112501051518;
  double a = lo, b = hi;
  double x = a + kCGold * (b - a), w = x, v = x;
  double fx = budget.spend(f, x), fw = fx, fv = fx;
  double d = 0.0, e = 0.0;
  for (int iter = 0; iter < 200 && !budget.exhausted; ++iter) {
    double xm = 0.5 * (a + b);
    double tol1 = tol * std::abs(x) + 1e-12;
    double tol2 = 2.0 * tol1;
    if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;
    bool take_golden = true;
    if (std::abs(e) > tol1) {
      // parabola through (x,fx),(w,fw),(v,fv)
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      double etemp = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * etemp) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (xm > x) ? tol1 : -tol1;
        take_golden = false;
      }
    }
    if (take_golden) {
      e = (x >= xm) ? a - x : b - x;
      d = kCGold * e;
    }
    double u = (std::abs(d) >= tol1) ? x + d : x + (d > 0 ? tol1 : -tol1);
    double fu = budget.spend(f, u);
    if (fu > fx) {
      if (u >= x)
        a = x;
      else
        b = x;
      v = w;
      fv = fw;
      w = x;
      fw = fx;
      x = u;
      fx = fu;
    } else {
      if (u < x)
        a = u;
      else
        b = u;
      if (fu > fw || w == x) {
        v = w;
        fv = fw;
        w = u;
        fw = fu;
      } else if (fu > fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }
  return {x, fx, budget.exhausted};
}

}  // namespace

SearchResult maximize(const std::function<double(double)>& objective, const ControlSpace& space,
                      const SearchSpec& spec) {
  if (const auto* fs = std::get_if<FiniteSet>(&space)) {
    // exhaustive scan in ascending order; strict improvement keeps the
    // smallest control on ties
    SearchResult best{fs->values.front(), objective(fs->values.front()), false};
    for (std::size_t i = 1; i < fs->values.size(); ++i) {
      double v = objective(fs->values[i]);
      if (v > best.value) best = {fs->values[i], v, false};
    }
    return best;
  }

  const auto& iv = std::get<Interval>(space);
  if (iv.hi == iv.lo) return {iv.lo, objective(iv.lo), false};
  if (spec.method == SearchMethod::Exhaustive)
    throw std::invalid_argument("exhaustive search requires a finite control set");
  if (spec.method == SearchMethod::ClosedFormQuadratic) {
    // caller promises the objective is quadratic in a; three evaluations pin
    // the coefficients exactly
    const double lo = iv.lo, hi = iv.hi, mid = 0.5 * (lo + hi);
    const double flo = objective(lo), fmid = objective(mid), fhi = objective(hi);
    const double h = mid - lo;
    const double c2 = (fhi - 2.0 * fmid + flo) / (2.0 * h * h);
    const double c1 = (fhi - flo) / (2.0 * h) - 2.0 * c2 * mid;
    const double c0 = fmid - c1 * mid - c2 * mid * mid;
    double a = quadratic_argmax(c0, c1, c2, iv);
    return {a, objective(a), false};
  }

  int starts = std::max(1, spec.multistart);
  Budget budget{std::max(spec.max_evaluations, 8 * starts)};
  SearchResult best;
  bool first = true;
  for (int s = 0; s < starts; ++s) {
    double lo = iv.lo + (iv.hi - iv.lo) * s / starts;
    double hi = iv.lo + (iv.hi - iv.lo) * (s + 1) / starts;
    SearchResult r = (spec.method == SearchMethod::GoldenSection)
                         ? golden(objective, lo, hi, spec.tolerance, budget)
                         : brent(objective, lo, hi, spec.tolerance, budget);
    if (first || r.value > best.value) {
      best = r;
      first = false;
    }
  }
  // interval endpoints compete as candidates
  double flo = objective(iv.lo), fhi = objective(iv.hi);
  if (flo > best.value) best = {iv.lo, flo, best.budget_exhausted};
  if (fhi > best.value) best = {iv.hi, fhi, best.budget_exhausted};
  best.budget_exhausted = budget.exhausted;
  return best;
}

SearchResult optimize(const std::function<double(double)>& objective, const ControlSpace& space,
                      const SearchSpec& spec, Sense sense) {
  if (sense == Sense::Maximize) return maximize(objective, space, spec);
  auto neg = [&objective](double a) { return -objective(a); };
  SearchResult r = maximize(neg, space, spec);
  r.value = -r.value;
  return r;
}

double quadratic_argmax(double c0, double c1, double c2, const Interval& space) {
  if (c2 < 0.0) return std::clamp(-c1 / (2.0 * c2), space.lo, space.hi);
  auto val = [&](double a) { return c0 + c1 * a + c2 * a * a; };
  double vlo = val(space.lo), vhi = val(space.hi);
  return vhi > vlo ? space.hi : space.lo;  // ties toward lo
}

}  // namespace mkv
