#pragma once

#include <functional>
#include <string>
#include <vector>

#include "carnot/algebra.hpp"

namespace carnot {

using MapFn = std::function<VectorXd(const VectorXd&)>;

/// Axis-aligned box chart.
struct Box {
  VectorXd lo, hi;
  int dim() const { return int(lo.size()); }
  bool contains(const VectorXd& x, double tol = 1e-9) const;
  VectorXd center() const { return 0.5 * (lo + hi); }
  Box shrunk(const VectorXd& margin) const;
};

/// Grid-sampled map between coordinate charts with multilinear interpolation.
class SampledMap {
 public:
  SampledMap() = default;
  SampledMap(Box box, std::vector<int> resolution, int out_dim);

  static SampledMap sample(const MapFn& f, const Box& box, const std::vector<int>& resolution,
                           int out_dim);

  const Box& box() const { return box_; }
  const std::vector<int>& resolution() const { return res_; }
  int in_dim() const { return box_.dim(); }
  int out_dim() const { return out_dim_; }
  double grid_step(int axis) const;

  std::int64_t node_count() const { return nodes_; }
  VectorXd node_coords(std::int64_t flat) const;
  VectorXd& node_value(std::int64_t flat) { return values_[size_t(flat)]; }
  const VectorXd& node_value(std::int64_t flat) const { return values_[size_t(flat)]; }
  std::int64_t flat_index(const std::vector<int>& idx) const;
  std::vector<int> multi_index(std::int64_t flat) const;
  bool interior(std::int64_t flat, int stencil = 1) const;

  /// Multilinear interpolation; throws ChartExit outside the box.
  VectorXd eval(const VectorXd& x) const;
  MapFn fn() const;

  /// Central-difference Jacobian on the grid at a node (needs full stencil).
  MatrixXd jacobian_at_node(const std::vector<int>& idx) const;
  /// Central-difference Jacobian at an arbitrary interior point with the
  /// grid step.
  MatrixXd jacobian(const VectorXd& x) const;

 private:
  Box box_;
  std::vector<int> res_;
  int out_dim_ = 0;
  std::int64_t nodes_ = 0;
  std::vector<VectorXd> values_;
};

/// Central-difference Jacobian of an arbitrary map.
MatrixXd numeric_jacobian(const MapFn& f, const VectorXd& x, double step);

/// Named analytic maps for the CLI and tests:
///   identity:d          identity on R^d
///   parabolic-shear           (a, b) -> (a + b^2, b)
///   a2b                 (a, b) -> (a^2, b)
///   linear:a,b,c,d      2x2 matrix rows (a, b; c, d)
///   shear-weier:N       (x, y) -> (x + g_N(y), y)
///   shear-abs           (x, y) -> (x + |y|, y)
///   lift-parabolic-shear      H^1 lift of parabolic-shear
///   lift-shear-weier:N  H^1 lift of the Weierstrass shear
///   lift-shear-abs      H^1 lift of the kink shear
///   lift-linear:a,b,c,d H^1 lift (A on the base, det A on the fiber)
///   dilate2             delta_2 on H^1
struct NamedMap {
  MapFn fn;
  int in_dim = 0;
  int out_dim = 0;
  std::string name;
};
NamedMap builtin_map(const std::string& name);

}  // namespace carnot
