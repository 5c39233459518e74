#pragma once

#include <span>
#include <variant>
#include <vector>

#include "mkv/core.hpp"

namespace mkv {

// ---------------------------------------------------------------------------
// Optimal scalar quantizer of N(0,1): L sorted points with Voronoi weights.
// Points satisfy the stationarity condition e_l = E[eps | eps in cell l].
// ---------------------------------------------------------------------------
struct Quantizer {
  std::vector<double> points;   // strictly increasing
  std::vector<double> weights;  // sum to 1
  double distortion = 0.0;      // squared L2 quantization error

  int size() const { return static_cast<int>(points.size()); }
  // Voronoi midpoint boundaries, size L+1 with -inf / +inf at the ends.
  std::vector<double> boundaries() const;
};

// Deterministic Lloyd fixed point with closed-form Gaussian cell centroids,
// initialized at equiprobable quantiles. Throws on non-convergence.
Quantizer lloyd_gaussian(int L, double tol = 1e-13, int max_iter = 500000);

// Nearest grid point by Euclidean distance; exact midpoints resolve to the
// lower index. Grid must be sorted ascending and nonempty.
struct Projection {
  int index;
  double point;
};
Projection project(std::span<const double> grid, double x);

// Bracketing for 1-D linear interpolation with clamping outside the hull:
// value(x) ~ (1-lambda) * v[lo] + lambda * v[hi].
struct Bracket {
  int lo, hi;
  double lambda;
};
Bracket interp_bracket(std::span<const double> grid, double x);

// ---------------------------------------------------------------------------
// Time-layer state grids: per layer and per coordinate a sorted point set;
// d=2 states use the outer product of the coordinate grids.
// ---------------------------------------------------------------------------
struct LayerGrids {
  int dim = 1;
  // layers[n][coord] -> sorted points (coord < dim)
  std::vector<std::vector<std::vector<double>>> layers;

  int n_layers() const { return static_cast<int>(layers.size()); }
  std::span<const double> coord(int n, int k) const { return layers[n][k]; }
  std::size_t layer_size(int n) const {
    std::size_t s = 1;
    for (int k = 0; k < dim; ++k) s *= layers[n][k].size();
    return s;
  }
};

// Grid construction schemes, one per state coordinate.
struct BrownianScaled {
  double scale = 1.0;
  bool sqrt_time = true;  // radius scale*sqrt(t_n); false uses scale*t_n
};
struct Centered {
  std::function<double(double)> center;  // t -> center
  std::function<double(double)> radius;  // t -> radius multiplier on the base points
};
struct Empirical {
  // explicit per-layer point lists (e.g. quantiles of a previous-run cloud)
  std::vector<std::vector<double>> points;
};
using GridScheme = std::variant<BrownianScaled, Centered, Empirical>;

struct GridOptions {
  bool strictly_positive = false;  // post-process points to be > 0
};

// Builds {Gamma_n} for n = 0..N as affine images of the base quantizer points
// (or explicit lists); layer 0 collapses to the singleton {z0}.
LayerGrids build_layer_grids(const TimeGrid& grid, std::span<const GridScheme> schemes,
                             const Quantizer& base, const Vec& z0,
                             std::span<const GridOptions> options = {});

// Per-layer quantiles of a simulated state cloud, for explore/exploit grid
// refitting. `cloud` is indexed [layer][sample].
std::vector<std::vector<double>> empirical_layer_points(
    const std::vector<std::vector<double>>& cloud, int n_points);

// ---------------------------------------------------------------------------
// Quantized one-step conditional expectation operators. `table` holds values
// on the layer-(n+1) grid (row-major over coordinates).
// ---------------------------------------------------------------------------

// Piecewise-constant: sum_l p_l * V(Proj(G_dt(z, a, e_l))).
double cond_exp_pc(const Vec& z, double a, std::span<const double> table, const Quantizer& quant,
                   const DiscreteProblem& problem, const LayerGrids& grids, int n_next);

// Semi-linear: one designated coordinate is linearly interpolated (with clamp
// outside the hull), the others are projected.
double cond_exp_semilinear(const Vec& z, double a, std::span<const double> table,
                           const Quantizer& quant, const DiscreteProblem& problem,
                           const LayerGrids& grids, int n_next, int interp_coord);

enum class QuantInterp { PiecewiseConstant, SemiLinear };

struct QuantDiagnostics {
  long long transitions = 0;
  long long boundary_hits = 0;  // transitions clamped at a grid edge
  bool boundary_warning() const {
    return transitions > 0 && boundary_hits * 5 >= transitions;  // > 20%
  }
};

// Backend exposing the quantized operators to the generic backward scaffold.
class QuantBackend final : public CondExpBackend {
 public:
  QuantBackend(const DiscreteProblem& p, LayerGrids grids, Quantizer quant, QuantInterp interp,
               int interp_coord = 0);

  int layers() const override;
  std::span<const Vec> points(int n) override;
  void fit(int n, std::span<const double> values_next) override;
  double cond_exp(int n, const Vec& z, double a) const override;
  void store_controls(int n, std::span<const double> controls) override;
  std::unique_ptr<Policy> extract_policy(const DiscreteProblem& p,
                                         const SearchSpec& spec) const override;

  const std::vector<std::vector<double>>& value_tables() const { return tables_; }
  const QuantDiagnostics& diagnostics() const { return diag_; }
  const LayerGrids& grids() const { return grids_; }

 private:
  const DiscreteProblem& p_;
  LayerGrids grids_;
  Quantizer quant_;
  QuantInterp interp_;
  int interp_coord_;
  std::vector<std::vector<Vec>> points_;          // materialized outer products
  std::vector<std::vector<double>> tables_;       // fitted values per layer
  std::vector<std::vector<double>> control_tab_;  // stored controls per layer
  mutable QuantDiagnostics diag_;
};

// Acts by projecting the query state onto the layer grid and returning the
// stored control from the table.
class GridPolicy final : public Policy {
 public:
  GridPolicy(LayerGrids grids, std::vector<std::vector<double>> controls, ControlSpace space);
  double act(int n, const Vec& z) const override;

 private:
  LayerGrids grids_;
  std::vector<std::vector<double>> controls_;
  ControlSpace space_;
};

struct QBackwardResult {
  std::unique_ptr<Policy> policy;
  std::vector<std::vector<double>> value_tables;
  QuantDiagnostics diagnostics;
};

// Quantization solver: value iteration over the layer grids with the chosen
// conditional-expectation operator.
QBackwardResult q_backward(const DiscreteProblem& p, LayerGrids grids, const Quantizer& quant,
                           const SearchSpec& spec, QuantInterp interp, int interp_coord = 0);

// CSV export/import of a quantizer (index, point, weight, lower, upper).
void save_quantizer_csv(const Quantizer& q, const std::string& path);
Quantizer load_quantizer_csv(const std::string& path);

}  // namespace mkv
