#include "carnot/curves.hpp"

#include <cmath>

#include "carnot/extension.hpp"

namespace carnot {

void Control::check(const StratifiedAlgebra& alg) const {
  if (times.size() < 2) throw input_error("control needs at least two grid nodes");
  if (values.rows() != times.size() || values.cols() != alg.rank())
    throw input_error("control values must be nodes x rank");
  if (std::abs(times[0]) > 1e-12 || std::abs(times[times.size() - 1] - 1.0) > 1e-12)
    throw input_error("control grid must span [0, 1]");
  for (int i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw input_error("control grid must be strictly increasing");
}

VectorXd Control::at(double t) const {
  const int n = int(times.size());
  if (t <= times[0]) return values.row(0).transpose();
  if (t >= times[n - 1]) return values.row(n - 1).transpose();
  int lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    int mid = (lo + hi) / 2;
    (times[mid] <= t ? lo : hi) = mid;
  }
  double w = (t - times[lo]) / (times[lo + 1] - times[lo]);
  return ((1.0 - w) * values.row(lo) + w * values.row(lo + 1)).transpose();
}

double HorizontalCurve::length_estimate() const {
  double len = 0.0;
  for (int i = 0; i + 1 < nodes(); ++i) {
    double seg = 0.0;
    for (int j = 0; j < algebra->rank(); ++j) {
      double d = points(i + 1, j) - points(i, j);
      seg += d * d;
    }
    len += std::sqrt(seg);
  }
  return len;
}

bool HorizontalCurve::closed(double tol) const {
  return (points.row(0) - points.row(nodes() - 1)).cwiseAbs().maxCoeff() <= tol;
}

HorizontalCurve endpoint(const StratifiedAlgebra& alg, const Control& control,
                         const VectorXd& start) {
  alg.ensure_valid();
  control.check(alg);
  if (start.size() != alg.dim()) throw structural_error("endpoint: start has wrong dimension");

  const int n = int(control.times.size());
  const int r = alg.rank();
  auto embed = [&](const VectorXd& u) {
    VectorXd full = VectorXd::Zero(alg.dim());
    full.segment(alg.layer_offset(1), r) = u;
    return full;
  };
  auto vel = [&](const VectorXd& y, double t) {
    return VectorXd(alg.left_invariant_frame(y) * embed(control.at(t)));
  };

  HorizontalCurve curve;
  curve.algebra = &alg;
  curve.times = control.times;
  curve.points.resize(n, alg.dim());
  curve.control = control;
  VectorXd y = start;
  curve.points.row(0) = y.transpose();
  for (int i = 0; i + 1 < n; ++i) {
    double t = control.times[i];
    double h = control.times[i + 1] - t;
    VectorXd k1 = vel(y, t);
    VectorXd k2 = vel(y + 0.5 * h * k1, t + 0.5 * h);
    VectorXd k3 = vel(y + 0.5 * h * k2, t + 0.5 * h);
    VectorXd k4 = vel(y + h * k3, t + h);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    curve.points.row(i + 1) = y.transpose();
  }
  return curve;
}

VectorXd line_integral(const OneFormField& form, const HorizontalCurve& curve) {
  if (form.space_dim() != curve.points.cols())
    throw structural_error("line_integral: form and curve dimension mismatch");
  VectorXd acc = VectorXd::Zero(form.fiber_dim());
  for (int i = 0; i + 1 < curve.nodes(); ++i) {
    VectorXd mid = 0.5 * (curve.point(i) + curve.point(i + 1));
    VectorXd dp = curve.point(i + 1) - curve.point(i);
    acc += form.coefficients(mid) * dp;
  }
  return acc;
}

HorizontalCurve horizontal_lift(const HorizontalCurve& base_curve, const VectorXd& start,
                                const CentralExtension& ext) {
  const StratifiedAlgebra& G = ext.extended();
  if (start.size() != G.dim()) throw structural_error("horizontal_lift: bad start dimension");
  VectorXd start_base = ext.project_base(start);
  if ((start_base - base_curve.point(0)).cwiseAbs().maxCoeff() > 1e-9)
    throw structural_error("horizontal_lift: basepoint mismatch beyond 1e-9");

  auto alpha = ext.potential_form();
  HorizontalCurve out;
  out.algebra = &G;
  out.times = base_curve.times;
  out.points.resize(base_curve.nodes(), G.dim());
  VectorXd fiber = ext.fiber_part(start);
  VectorXd g = ext.embed_base(base_curve.point(0)) + ext.embed_fiber(fiber);
  out.points.row(0) = g.transpose();
  for (int i = 0; i + 1 < base_curve.nodes(); ++i) {
    VectorXd mid = 0.5 * (base_curve.point(i) + base_curve.point(i + 1));
    VectorXd dp = base_curve.point(i + 1) - base_curve.point(i);
    fiber += alpha->coefficients(mid) * dp;
    out.points.row(i + 1) =
        (ext.embed_base(base_curve.point(i + 1)) + ext.embed_fiber(fiber)).transpose();
  }
  return out;
}

HorizontalCurve polygon_curve(const StratifiedAlgebra& alg, const std::vector<VectorXd>& verts,
                              int nodes_per_unit) {
  if (verts.size() < 2) throw input_error("polygon needs at least two vertices");
  std::vector<VectorXd> pts;
  pts.push_back(verts[0]);
  for (size_t v = 0; v + 1 < verts.size(); ++v) {
    VectorXd d = verts[v + 1] - verts[v];
    double len = d.norm();
    int segs = std::max(2, int(std::ceil(len * nodes_per_unit)));
    for (int s = 1; s <= segs; ++s) pts.push_back(verts[v] + (double(s) / segs) * d);
  }
  HorizontalCurve c;
  c.algebra = &alg;
  c.times.resize(int(pts.size()));
  c.points.resize(int(pts.size()), alg.dim());
  for (size_t i = 0; i < pts.size(); ++i) {
    c.times[int(i)] = double(i) / double(pts.size() - 1);
    c.points.row(int(i)) = pts[i].transpose();
  }
  return c;
}

}  // namespace carnot
