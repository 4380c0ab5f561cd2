#pragma once

#include <cmath>
#include <functional>

#include "carnot/maps.hpp"

namespace carnot {

/// Weierstrass partial sum g_N(y) = sum_{n=0..N} (1/9)^n cos(27^n pi y);
/// 2/3-Hoelder in the limit, with tail bound (1/9)^{N+1} / (1 - 1/9).
double weierstrass(double y, int N);
double weierstrass_antiderivative(double y, int N);
double weierstrass_tail_bound(int N);

/// Smooth compactly supported bump on the unit d_K-ball with unit mass under
/// its own quadrature rule, scaled by eta_eps(x) = eps^{-Q} profile(delta_{1/eps} x).
/// The profile is exp(-1/(1 - rho)) with rho a delta-homogeneous polynomial,
/// so the support scales exactly with the dilation.
///
/// This replaces the sub-Riemannian heat kernel; only unit mass, support
/// scale and |X eta| bounds enter the estimates. The substitution is recorded
/// in experiment metadata.
class MollifierKernel {
 public:
  static MollifierKernel standard(const StratifiedAlgebra& alg, int nodes_per_axis = 17);

  const StratifiedAlgebra& algebra() const { return *alg_; }
  int nodes() const { return int(weights_.size()); }
  /// unit-scale quadrature offsets (rows) with normalized weights
  const MatrixXd& offsets() const { return offsets_; }
  const VectorXd& weights() const { return weights_; }
  /// offset scaled to mollification scale eps: per-coordinate eps^weight
  VectorXd scaled_offset(int q, double eps) const;
  std::string describe() const;

 private:
  const StratifiedAlgebra* alg_ = nullptr;
  int nodes_per_axis_ = 0;
  MatrixXd offsets_;
  VectorXd weights_;
};

/// f_eps = f * eta_eps as an evaluator: sum_q w_q f(x . (delta_eps u_q)^-1),
/// Haar = Lebesgue in first-kind coordinates.
MapFn mollified_map(const MapFn& f, const StratifiedAlgebra& alg, double eps,
                    const MollifierKernel& kernel);

/// Grid-sampled group convolution over a chart already shrunk by the caller;
/// reads of f outside its own chart surface as ChartExit (margin violation).
SampledMap group_convolve(const MapFn& f, const StratifiedAlgebra& alg, double eps,
                          const MollifierKernel& kernel, const Box& out_box,
                          const std::vector<int>& out_res, int out_dim);
SampledMap group_convolve_serial(const MapFn& f, const StratifiedAlgebra& alg, double eps,
                                 const MollifierKernel& kernel, const Box& out_box,
                                 const std::vector<int>& out_res, int out_dim);

/// <f_eps^* omega_j, X_i>(p): the pullback of the target's j-th invariant
/// coframe element paired with the domain's i-th frame field, via a
/// central-difference Jacobian (0-based indices).
double pullback_derivative(const MapFn& f_eps, const StratifiedAlgebra& domain,
                           const StratifiedAlgebra& target, int omega_index, int x_index,
                           const VectorXd& p, double fd_step);
double pullback_derivative(const SampledMap& f_eps, const StratifiedAlgebra& domain,
                           const StratifiedAlgebra& target, int omega_index, int x_index,
                           const VectorXd& p);

struct DecayPoint {
  double eps;
  double sup;
};

struct DecayResult {
  std::vector<DecayPoint> points;
  double slope = 0.0;
  double fit_residual = 0.0;
  bool at_noise_floor = false;
  bool certifies = false;       // liftability conclusions only offered for beta > 1/2
  bool in_weight_regime = true; // weight(omega_j) > weight(X_i)
  std::string kernel_info;
};

struct DecayOptions {
  double beta = 1.0;           // claimed exponent, for the guard and metadata
  double fd_step_factor = 0.125;  // Jacobian step = factor * eps for analytic sources
  int trim = 2;                // drop this many eps at both ends when >= 8 supplied
};

/// sup over probes of |<f_eps^* omega_j, X_i>| per eps, least-squares slope
/// on log-log axes. Requires at least 4 eps values.
DecayResult decay_slope(const MapFn& f, const StratifiedAlgebra& domain,
                        const StratifiedAlgebra& target, int omega_index, int x_index,
                        const std::vector<double>& eps_grid, const std::vector<VectorXd>& probes,
                        const MollifierKernel& kernel, const DecayOptions& opt);

/// Sampled lower bound of [f]_beta = sup d_K(f x, f y) / d_K(x, y)^beta over
/// seeded pairs whose separations span the scale range; beta in (0, 1].
/// max_separation restricts to pairs with d_K(x,y) <= max_separation.
double hoelder_seminorm(const MapFn& f, const StratifiedAlgebra& domain,
                        const StratifiedAlgebra& target, const Box& chart, double beta,
                        int pair_budget, std::uint64_t seed,
                        double max_separation = std::numeric_limits<double>::infinity());

struct YoungResult {
  double value = 0.0;                 // finest-level sum
  std::vector<int> levels;
  std::vector<double> level_values;
  std::vector<double> deltas;         // |S_L - S_{L-1}|, aligned with levels[1:]
};

/// Riemann-Stieltjes sums on dyadic partitions of [a, b] with the integrand
/// evaluated at segment midpoints (exact for piecewise-linear data).
/// Declared exponents must satisfy alpha + beta > 1.
YoungResult young_integral(const std::function<double(double)>& f,
                           const std::function<double(double)>& g, double a, double b,
                           double alpha, double beta, int level_min, int level_max);

}  // namespace carnot
