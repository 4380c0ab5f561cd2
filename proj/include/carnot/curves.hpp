#pragma once

#include <optional>

#include "carnot/forms.hpp"

namespace carnot {

/// Horizontal control signal: piecewise-linear u(t) in g^[1] on a strictly
/// increasing grid over [0, 1].
struct Control {
  VectorXd times;   // strictly increasing, endpoints 0 and 1
  MatrixXd values;  // nodes x rank

  void check(const StratifiedAlgebra& alg) const;
  VectorXd at(double t) const;  // linear interpolation
};

/// Time-sampled group-valued path with optional generating control.
struct HorizontalCurve {
  const StratifiedAlgebra* algebra = nullptr;
  VectorXd times;   // grid
  MatrixXd points;  // nodes x dim
  std::optional<Control> control;

  int nodes() const { return int(times.size()); }
  VectorXd point(int i) const { return points.row(i).transpose(); }
  double length_estimate() const;  // sum of horizontal chord lengths
  bool closed(double tol = 1e-9) const;
};

/// Fourth-order one-step integration of the Cauchy problem
/// gamma' = Frame(gamma) u(t) on the control grid.
HorizontalCurve endpoint(const StratifiedAlgebra& alg, const Control& control,
                         const VectorXd& start);

/// Composite Riemann-Stieltjes line integral with the midpoint rule on each
/// segment; second-order convergent.
VectorXd line_integral(const OneFormField& form, const HorizontalCurve& curve);

/// Horizontal lift of a base curve through a central extension: base
/// coordinates are carried over and the fiber increment is the running
/// integral of the potential.
class CentralExtension;
HorizontalCurve horizontal_lift(const HorizontalCurve& base_curve, const VectorXd& start,
                                const CentralExtension& ext);

/// Planar-style polygon curve through the given vertices (closed when the
/// last vertex equals the first), resampled at roughly nodes_per_unit points
/// per unit length.
HorizontalCurve polygon_curve(const StratifiedAlgebra& alg, const std::vector<VectorXd>& verts,
                              int nodes_per_unit);

}  // namespace carnot
