#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <thread>
#include <vector>

namespace mkv {

// ---------------------------------------------------------------------------
// Small fixed-capacity state vector. Problems here live in R^d with d <= 8
// (two benchmark coordinates plus an optional per-path parameter, or one
// moment coordinate per embedding degree), so a stack vector avoids heap
// traffic in the simulation loops.
// ---------------------------------------------------------------------------
class Vec {
 public:
  static constexpr int kMaxDim = 8;

  Vec() = default;
  Vec(std::initializer_list<double> xs) {
    if (static_cast<int>(xs.size()) > kMaxDim) throw std::length_error("Vec: dim > 8");
    for (double x : xs) v_[n_++] = x;
  }
  static Vec zeros(int d) {
    Vec z;
    z.resize(d);
    return z;
  }

  void resize(int d) {
    if (d < 0 || d > kMaxDim) throw std::length_error("Vec: dim out of range");
    for (int i = n_; i < d; ++i) v_[i] = 0.0;
    n_ = d;
  }
  void push_back(double x) {
    if (n_ == kMaxDim) throw std::length_error("Vec: dim > 8");
    v_[n_++] = x;
  }

  double& operator[](int i) { return v_[i]; }
  double operator[](int i) const { return v_[i]; }
  int size() const { return n_; }
  const double* data() const { return v_.data(); }

  bool finite() const {
    for (int i = 0; i < n_; ++i)
      if (!std::isfinite(v_[i])) return false;
    return true;
  }

 private:
  std::array<double, kMaxDim> v_{};
  int n_ = 0;
};

enum class Sense { Maximize, Minimize };

// true if `candidate` is strictly better than `incumbent` under `sense`
inline bool improves(Sense sense, double candidate, double incumbent) {
  return sense == Sense::Maximize ? candidate > incumbent : candidate < incumbent;
}

// ---------------------------------------------------------------------------
// Normal distribution helpers (shared by the quantizer, the regression
// conditioning formulas and the RNG below).
// ---------------------------------------------------------------------------
namespace normal {

inline double pdf(double x) {
  static const double kInvSqrt2Pi = 0.3989422804014326779;
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

inline double cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

// Inverse CDF: Acklam's rational approximation refined by one Halley step.
// Accurate to ~1e-15 over (0,1); deterministic across platforms.
double inv_cdf(double p);

// E[eps^j] for standard normal: 0 for odd j, (j-1)!! for even j.
double moment(int j);

}  // namespace normal

// ---------------------------------------------------------------------------
// Reproducible RNG streams. Identical (seed, stream) pairs reproduce the
// identical sequence bit-for-bit, independent of platform and thread count;
// simulations index streams by path id so parallel and serial runs agree.
// xoshiro256++ core seeded through splitmix64.
// ---------------------------------------------------------------------------
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  // uniform on the open interval (0,1)
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }
  // standard normal via inverse CDF (one uniform per draw)
  double normal() { return normal::inv_cdf(uniform()); }

 private:
  std::array<std::uint64_t, 4> s_{};
};

// ---------------------------------------------------------------------------
// Data-parallel loop over [0, n). Work items must be independent; results
// should be written to per-index slots so the outcome does not depend on the
// number of workers.
// ---------------------------------------------------------------------------
int default_threads();
void set_default_threads(int n);
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& body,
                  int threads = 0);

}  // namespace mkv
