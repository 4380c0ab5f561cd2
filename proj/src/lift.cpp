#include "carnot/lift.hpp"

#include <algorithm>
#include <cmath>

namespace carnot {

MatrixXd pointwise_fiber_candidate(const MapFn& f, const VectorXd& p,
                                   const CentralExtension& ext1, const CentralExtension& ext2) {
  const StratifiedAlgebra& h1 = ext1.base();
  MatrixXd J = numeric_jacobian(f, p, 1e-5);
  VectorXd fp = f(p);
  const int n1 = h1.dim();
  const int f1 = ext1.fiber_dim(), f2 = ext2.fiber_dim();

  // rows: base pairs (i < j); per target component v solve
  //   sum_w Phi(v, w) rho1_w(i, j)  ~=  (f^* rho2_v)(i, j)
  // over graded entries (matching fiber weights).
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n1; ++i)
    for (int j = i + 1; j < n1; ++j) pairs.emplace_back(i, j);

  std::vector<MatrixXd> rho1(f1);
  for (int w = 0; w < f1; ++w) rho1[w] = ext1.cocycle().coefficient_matrix_at(p, w);

  MatrixXd Phi = MatrixXd::Zero(f2, f1);
  for (int v = 0; v < f2; ++v) {
    MatrixXd pulled = J.transpose() * ext2.cocycle().coefficient_matrix_at(fp, v) * J;
    std::vector<int> cols;
    for (int w = 0; w < f1; ++w)
      if (ext1.fiber_weight(w) == ext2.fiber_weight(v)) cols.push_back(w);
    if (cols.empty()) continue;
    MatrixXd A(int(pairs.size()), int(cols.size()));
    VectorXd b(int(pairs.size()));
    for (size_t r = 0; r < pairs.size(); ++r) {
      auto [i, j] = pairs[r];
      for (size_t c = 0; c < cols.size(); ++c) A(int(r), int(c)) = rho1[cols[c]](i, j);
      b[int(r)] = pulled(i, j);
    }
    VectorXd sol = A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
    for (size_t c = 0; c < cols.size(); ++c) Phi(v, cols[c]) = sol[int(c)];
  }
  return Phi;
}

VectorXd closed_loop_defect(const MapFn& f, const HorizontalCurve& loop,
                            const CentralExtension& ext1, const CentralExtension& ext2,
                            MatrixXd* phi_hat_out) {
  if (loop.nodes() < 3) throw domain_error("closed_loop_defect: loops need at least 3 nodes");
  if (!loop.closed(1e-9))
    throw domain_error("closed_loop_defect: loop endpoints differ beyond 1e-9");
  if (loop.points.cols() != ext1.base().dim())
    throw structural_error("closed_loop_defect: loop lives in the wrong chart");

  VectorXd p0 = loop.point(0);
  MatrixXd Phi = pointwise_fiber_candidate(f, p0, ext1, ext2);
  if (phi_hat_out) *phi_hat_out = Phi;

  auto alpha2 = ext2.potential_form();
  auto alpha1 = ext1.potential_form();

  // midpoint Riemann-Stieltjes of f^* alpha_2 along the loop
  VectorXd circ2 = VectorXd::Zero(ext2.fiber_dim());
  VectorXd circ1 = VectorXd::Zero(ext1.fiber_dim());
  for (int i = 0; i + 1 < loop.nodes(); ++i) {
    VectorXd a = loop.point(i), b = loop.point(i + 1);
    VectorXd mid = 0.5 * (a + b);
    circ2 += alpha2->coefficients(f(mid)) * (f(b) - f(a));
    circ1 += alpha1->coefficients(mid) * (b - a);
  }
  return circ2 - Phi * circ1;
}

// ---- probe family ----

namespace {

HorizontalCurve rectangle_loop(const StratifiedAlgebra& alg, const VectorXd& anchor, int ax1,
                               int ax2, double s1, double s2, int nodes_per_unit) {
  std::vector<VectorXd> verts;
  VectorXd p = anchor;
  verts.push_back(p);
  p[ax1] += s1;
  verts.push_back(p);
  p[ax2] += s2;
  verts.push_back(p);
  p[ax1] -= s1;
  verts.push_back(p);
  p[ax2] -= s2;
  verts.push_back(p);
  return polygon_curve(alg, verts, nodes_per_unit);
}

}  // namespace

CheckLiftReport check_lift(const MapFn& f, const CentralExtension& ext1,
                           const CentralExtension& ext2, const Box& base_chart,
                           const CheckLiftOptions& opt) {
  const StratifiedAlgebra& h1 = ext1.base();
  const int d = base_chart.dim();
  if (d != h1.dim()) throw structural_error("check_lift: chart does not match the base group");

  std::vector<HorizontalCurve> loops;
  VectorXd span = base_chart.hi - base_chart.lo;

  // axis-aligned rectangles at the given scales, anchored on a coarse sub-grid
  for (double rel : opt.scales) {
    for (int ax1 = 0; ax1 < d; ++ax1)
      for (int ax2 = ax1 + 1; ax2 < d; ++ax2) {
        double s1 = rel * span[ax1], s2 = rel * span[ax2];
        for (int ia = 0; ia < opt.anchors_per_axis; ++ia)
          for (int ja = 0; ja < opt.anchors_per_axis; ++ja) {
            VectorXd anchor = base_chart.lo;
            for (int a = 0; a < d; ++a) anchor[a] += 0.5 * (span[a] - rel * span[a]);
            anchor[ax1] = base_chart.lo[ax1] +
                          (span[ax1] - s1) * double(ia) / std::max(1, opt.anchors_per_axis - 1);
            anchor[ax2] = base_chart.lo[ax2] +
                          (span[ax2] - s2) * double(ja) / std::max(1, opt.anchors_per_axis - 1);
            loops.push_back(rectangle_loop(h1, anchor, ax1, ax2, s1, s2, opt.nodes_per_unit));
          }
      }
  }

  // seeded random polygonal loops
  Rng rng(opt.seed ^ 0x10057);
  for (int t = 0; t < opt.random_loops; ++t) {
    int k = rng.uniform_int(5, 9);
    std::vector<VectorXd> verts;
    for (int v = 0; v < k; ++v) {
      VectorXd x(d);
      for (int a = 0; a < d; ++a)
        x[a] = base_chart.lo[a] + span[a] * (0.1 + 0.8 * rng.uniform());
      verts.push_back(x);
    }
    verts.push_back(verts[0]);
    loops.push_back(polygon_curve(h1, verts, opt.nodes_per_unit / 4));
  }

  CheckLiftReport rep;
  rep.tol_per_length = opt.tol_per_length;
  rep.loops_checked = int(loops.size());
  rep.records.resize(loops.size());
  auto body = [&](std::int64_t i) {
    const HorizontalCurve& loop = loops[size_t(i)];
    VectorXd defect = closed_loop_defect(f, loop, ext1, ext2);
    double len = loop.length_estimate();
    double dmax = defect.cwiseAbs().maxCoeff();
    rep.records[size_t(i)] = {dmax, len, dmax / std::max(len, 1e-12)};
  };
  if (opt.parallel)
    parallel_for(std::int64_t(loops.size()), body);
  else
    serial_for(std::int64_t(loops.size()), body);

  int worst = 0;
  for (size_t i = 0; i < loops.size(); ++i)
    if (rep.records[i].normalized > rep.records[worst].normalized) worst = int(i);
  rep.max_normalized_defect = rep.records[worst].normalized;
  rep.witness = loops[size_t(worst)];
  rep.witness_defect = rep.records[size_t(worst)].defect;
  rep.witness_length = rep.records[size_t(worst)].length;
  rep.pass = rep.max_normalized_defect <= opt.tol_per_length;
  return rep;
}

// ---- canonical path lift ----

namespace {

struct FlowSegment {
  VectorXd start_ext;  // G1 point at the segment start
  int axis_ext;        // extended-coordinate index of the horizontal direction
  double length;       // signed flow time
};

// Composite Simpson of A2(f(base(t))) . d/dt f(base(t)) over one flow
// segment; the base projection of the segment and its velocity come from the
// group structure exactly.
VectorXd segment_pull_integral(const MapFn& f, const CentralExtension& ext1,
                               const OneFormField& alpha2, const FlowSegment& seg,
                               int simpson_per_unit) {
  const StratifiedAlgebra& G1 = ext1.extended();
  const StratifiedAlgebra& H1 = ext1.base();
  int nsub = std::max(2, int(std::ceil(std::abs(seg.length) * simpson_per_unit)));
  nsub += nsub % 2;  // even
  const int nodes = nsub + 1;
  const double h = seg.length / nsub;

  // base-axis index of the horizontal direction
  int base_axis = -1;
  for (int i = 0; i < H1.dim(); ++i)
    if (ext1.base_index()[i] == seg.axis_ext) base_axis = i;
  if (base_axis < 0) throw structural_error("lift path: non-base flow axis");

  VectorXd acc = VectorXd::Zero(alpha2.fiber_dim());
  VectorXd e_ax = VectorXd::Unit(G1.dim(), seg.axis_ext);
  for (int k = 0; k < nodes; ++k) {
    double t = k * h;
    VectorXd gx = G1.multiply(seg.start_ext, t * e_ax);
    VectorXd base = ext1.project_base(gx);
    VectorXd vel = H1.left_invariant_frame(base).col(base_axis);
    MatrixXd Jf = numeric_jacobian(f, base, 1e-5);
    VectorXd integrand = alpha2.coefficients(f(base)) * (Jf * vel);
    double w = (k == 0 || k == nodes - 1) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    acc += (w * h / 3.0) * integrand;
  }
  return acc;
}

struct CanonicalPath {
  std::vector<FlowSegment> segments;
  VectorXd end_ext;
};

// Horizontal staircase to the target's horizontal coordinates, then
// commutator rectangles realizing every weight-2 coordinate (base layer 2
// and the central fiber together). Requires a step-2 extended group.
CanonicalPath canonical_path(const CentralExtension& ext1, const VectorXd& g0, const VectorXd& g,
                             const Box& base_chart) {
  const StratifiedAlgebra& G1 = ext1.extended();
  const StratifiedAlgebra& H1 = ext1.base();
  if (G1.step() > 2)
    throw domain_error(
        "lift path: canonical staircase construction supports step-2 extended groups");

  CanonicalPath path;
  VectorXd cur = g0;
  const int rank = G1.rank();

  auto base_horiz = [&](const VectorXd& gext) {
    VectorXd h = ext1.project_base(gext);
    return VectorXd(h.head(rank));
  };
  auto push_flow = [&](int axis_ext, double len) {
    if (len == 0.0) return;
    path.segments.push_back({cur, axis_ext, len});
    cur = G1.multiply(cur, len * VectorXd::Unit(G1.dim(), axis_ext));
  };

  // staircase along the horizontal axes (all horizontal directions are base
  // directions for rank-preserving extensions)
  VectorXd target_h = base_horiz(g);
  for (int a = 0; a < rank; ++a) {
    double delta = target_h[a] - base_horiz(cur)[a];
    push_flow(ext1.base_index()[a], delta);
  }

  // remaining weight-2 gap, realized by rectangles
  const int n2 = G1.dim() - rank;
  VectorXd gap(n2);
  for (int i = 0; i < n2; ++i) gap[i] = g[rank + i] - cur[rank + i];
  // weight-2 coordinates sit after the horizontal block in a step-2 group
  // (base layer 2 first, then the fiber, per the extension index maps)

  if (gap.cwiseAbs().maxCoeff() > 1e-15) {
    // area system: rectangle of unit area in plane (i, j) adds c^k_{ij} to
    // weight-2 coordinate k
    std::vector<std::pair<int, int>> planes;
    for (int i = 0; i < rank; ++i)
      for (int j = i + 1; j < rank; ++j) planes.emplace_back(i, j);
    MatrixXd A(n2, int(planes.size()));
    for (int k = 0; k < n2; ++k)
      for (size_t pl = 0; pl < planes.size(); ++pl)
        A(k, int(pl)) = G1.structure_constant(planes[pl].first, planes[pl].second, rank + k);
    VectorXd areas = A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(gap);
    if ((A * areas - gap).cwiseAbs().maxCoeff() > 1e-9)
      throw domain_error("lift path: node unreachable within chart (area system unsolvable)");

    for (size_t pl = 0; pl < planes.size(); ++pl) {
      double area = areas[int(pl)];
      if (std::abs(area) < 1e-15) continue;
      auto [i, j] = planes[pl];
      // margins toward the box walls from the current anchor
      VectorXd h = ext1.project_base(cur);
      double mi_plus = base_chart.hi[i] - h[i], mi_minus = h[i] - base_chart.lo[i];
      double mj_plus = base_chart.hi[j] - h[j], mj_minus = h[j] - base_chart.lo[j];
      double di = mi_plus >= mi_minus ? 1.0 : -1.0;
      double dj = mj_plus >= mj_minus ? 1.0 : -1.0;
      double mi = 0.9 * std::max(mi_plus, mi_minus), mj = 0.9 * std::max(mj_plus, mj_minus);
      if (mi <= 0 || mj <= 0) throw domain_error("lift path: node unreachable within chart");
      double si = std::min(std::sqrt(std::abs(area)), mi);
      double sj = std::abs(area) / si;
      int pieces = 1;
      if (sj > mj) {
        pieces = int(std::ceil(sj / mj));
        if (pieces > 64) throw domain_error("lift path: node unreachable within chart");
        sj /= pieces;
      }
      bool natural = (di * dj > 0) == (area > 0);
      for (int piece = 0; piece < pieces; ++piece) {
        int ei = ext1.base_index()[i], ej = ext1.base_index()[j];
        if (natural) {
          push_flow(ei, di * si);
          push_flow(ej, dj * sj);
          push_flow(ei, -di * si);
          push_flow(ej, -dj * sj);
        } else {  // reversed order flips the enclosed area
          push_flow(ej, dj * sj);
          push_flow(ei, di * si);
          push_flow(ej, -dj * sj);
          push_flow(ei, -di * si);
        }
      }
    }
  }

  if ((cur - g).cwiseAbs().maxCoeff() > 1e-7)
    throw structural_error("lift path: canonical path failed to reach the node");
  path.end_ext = cur;
  return path;
}

}  // namespace

VectorXd lift_point(const MapFn& f, const CentralExtension& ext1, const CentralExtension& ext2,
                    const VectorXd& g0, const VectorXd& p0, const VectorXd& g,
                    const Box& base_chart, const LiftOptions& opt) {
  if (!ext2.rank_preserving())
    throw structural_error("lift: target extension must be rank-preserving");
  VectorXd f_at_pi_g0 = f(ext1.project_base(g0));
  if ((ext2.project_base(p0) - f_at_pi_g0).cwiseAbs().maxCoeff() > 1e-9)
    throw structural_error("lift: basepoint pair does not satisfy pi2(p0) = f(pi1(g0))");

  auto alpha2 = ext2.potential_form();
  CanonicalPath path = canonical_path(ext1, g0, g, base_chart);
  VectorXd integral = VectorXd::Zero(ext2.fiber_dim());
  for (const auto& seg : path.segments)
    integral += segment_pull_integral(f, ext1, *alpha2, seg, opt.simpson_per_unit);

  VectorXd out = ext2.embed_base(f(ext1.project_base(g)));
  VectorXd fiber = ext2.fiber_part(p0) + integral;
  return ext2.extended().multiply(out, ext2.embed_fiber(fiber));
}

static SampledMap lift_map_impl(const MapFn& f, const CentralExtension& ext1,
                                const CentralExtension& ext2, const VectorXd& g0,
                                const VectorXd& p0, const Box& ext_chart,
                                const std::vector<int>& res, const LiftOptions& opt,
                                bool parallel) {
  const int bd = ext1.base().dim();
  Box base_chart;
  base_chart.lo = VectorXd(bd);
  base_chart.hi = VectorXd(bd);
  for (int i = 0; i < bd; ++i) {
    base_chart.lo[i] = ext_chart.lo[ext1.base_index()[i]];
    base_chart.hi[i] = ext_chart.hi[ext1.base_index()[i]];
  }

  if (opt.run_probe) {
    CheckLiftReport rep = check_lift(f, ext1, ext2, base_chart, opt.probe);
    if (!rep.pass) {
      char buf[128];
      std::snprintf(buf, sizeof(buf), "not liftable at tolerance %.3e (worst defect %.3e/len)",
                    rep.tol_per_length, rep.max_normalized_defect);
      throw NotLiftableError(buf, std::move(rep));
    }
  }

  SampledMap out(ext_chart, res, ext2.extended().dim());
  auto body = [&](std::int64_t i) {
    out.node_value(i) = lift_point(f, ext1, ext2, g0, p0, out.node_coords(i), base_chart, opt);
  };
  if (parallel)
    parallel_for(out.node_count(), body);
  else
    serial_for(out.node_count(), body);
  return out;
}

SampledMap lift_map(const MapFn& f, const CentralExtension& ext1, const CentralExtension& ext2,
                    const VectorXd& g0, const VectorXd& p0, const Box& ext_chart,
                    const std::vector<int>& res, const LiftOptions& opt) {
  return lift_map_impl(f, ext1, ext2, g0, p0, ext_chart, res, opt, true);
}

SampledMap lift_map_serial(const MapFn& f, const CentralExtension& ext1,
                           const CentralExtension& ext2, const VectorXd& g0, const VectorXd& p0,
                           const Box& ext_chart, const std::vector<int>& res,
                           const LiftOptions& opt) {
  return lift_map_impl(f, ext1, ext2, g0, p0, ext_chart, res, opt, false);
}

FiberHomReport fiber_hom_extract(const MapFn& F, const CentralExtension& ext1,
                                 const CentralExtension& ext2, const Box& ext_chart,
                                 int probes_per_axis, double zeta) {
  const StratifiedAlgebra& G1 = ext1.extended();
  const StratifiedAlgebra& G2 = ext2.extended();
  const int f1 = ext1.fiber_dim(), f2 = ext2.fiber_dim();
  const int d = G1.dim();
  if (probes_per_axis < 1) throw domain_error("fiber_hom_extract: need probes");

  // probe basepoints on an interior lattice, keeping fiber translates inside
  std::vector<VectorXd> probes;
  {
    VectorXd margin = VectorXd::Zero(d);
    for (int v = 0; v < f1; ++v) margin[ext1.fiber_index()[v]] = 2.1 * zeta;
    Box inner = ext_chart.shrunk(margin + 0.05 * (ext_chart.hi - ext_chart.lo));
    std::vector<int> idx(d, 0);
    while (true) {
      VectorXd x(d);
      for (int a = 0; a < d; ++a)
        x[a] = probes_per_axis == 1
                   ? 0.5 * (inner.lo[a] + inner.hi[a])
                   : inner.lo[a] + (inner.hi[a] - inner.lo[a]) * idx[a] / (probes_per_axis - 1);
      probes.push_back(x);
      int a = d - 1;
      while (a >= 0 && ++idx[a] == probes_per_axis) idx[a--] = 0;
      if (a < 0) break;
    }
  }

  // samples q(g, k) = F(g)^{-1} * F(g k) for k = zeta e_v and 2 zeta e_v
  const int np = int(probes.size());
  std::vector<VectorXd> q1(size_t(np) * f1), q2(size_t(np) * f1);
  parallel_for(std::int64_t(np) * f1, [&](std::int64_t t) {
    int pi = int(t / f1), v = int(t % f1);
    VectorXd g = probes[size_t(pi)];
    VectorXd Fg = F(g);
    auto translate = [&](double z) {
      VectorXd k = VectorXd::Zero(f1);
      k[v] = z;
      VectorXd gk = G1.multiply(g, ext1.embed_fiber(k));
      return VectorXd(G2.left_quotient(Fg, F(gk)));
    };
    q1[size_t(t)] = translate(zeta);
    q2[size_t(t)] = translate(2.0 * zeta);
  });

  FiberHomReport rep;
  rep.Phi = MatrixXd::Zero(f2, f1);
  // mean over probes, then deviation
  for (int v = 0; v < f1; ++v) {
    VectorXd mean = VectorXd::Zero(G2.dim());
    for (int pi = 0; pi < np; ++pi) mean += q1[size_t(pi) * f1 + v];
    mean /= double(np);
    rep.Phi.col(v) = ext2.fiber_part(mean) / zeta;
    for (int pi = 0; pi < np; ++pi) {
      double dev = (q1[size_t(pi) * f1 + v] - mean).cwiseAbs().maxCoeff();
      rep.max_deviation = std::max(rep.max_deviation, dev);
    }
    // scaling residual |q(2 zeta) - 2 q(zeta)| per probe
    for (int pi = 0; pi < np; ++pi) {
      VectorXd lin = q2[size_t(pi) * f1 + v] - 2.0 * q1[size_t(pi) * f1 + v];
      rep.linearity_residual = std::max(rep.linearity_residual, lin.cwiseAbs().maxCoeff());
    }
  }
  return rep;
}

VectorXd pansu_quotient(const MapFn& F, const StratifiedAlgebra& G1, const StratifiedAlgebra& G2,
                        const VectorXd& g, const VectorXd& h, double lambda) {
  if (!(lambda > 0.0)) throw domain_error("pansu_quotient: lambda must be positive");
  VectorXd moved = G1.multiply(g, G1.dilate(lambda, h));
  return G2.dilate(1.0 / lambda, G2.left_quotient(F(g), F(moved)));
}

GeneratorCheckReport contact_generator_check(const std::function<double(const VectorXd&)>& p4,
                                             const std::function<double(const VectorXd&)>& p2,
                                             const Box& chart, double h, double viol_tol) {
  if (chart.dim() != 4) throw domain_error("contact_generator_check: chart must be 4-dimensional");
  if (!(h > 0.0)) throw domain_error("contact_generator_check: bad step");
  (void)p2;  // the generator system does not constrain p2

  std::vector<int> res(4);
  for (int a = 0; a < 4; ++a) {
    res[a] = int(std::floor((chart.hi[a] - chart.lo[a]) / h)) + 1;
    if (res[a] < 3) throw domain_error("contact_generator_check: grid too coarse for stencil");
  }

  std::int64_t total = 1;
  for (int a = 0; a < 4; ++a) total *= res[a];
  std::vector<double> r1(total, 0.0), r2(total, 0.0), r3(total, 0.0), r4(total, 0.0);

  parallel_for(total, [&](std::int64_t t) {
    std::int64_t rem = t;
    int idx[4];
    for (int a = 3; a >= 0; --a) {
      idx[a] = int(rem % res[a]);
      rem /= res[a];
    }
    for (int a = 0; a < 4; ++a)
      if (idx[a] == 0 || idx[a] == res[a] - 1) return;  // need a full stencil
    VectorXd x(4);
    for (int a = 0; a < 4; ++a) x[a] = chart.lo[a] + h * idx[a];
    auto d = [&](int a) {
      VectorXd xp = x, xm = x;
      xp[a] += h;
      xm[a] -= h;
      return (p4(xp) - p4(xm)) / (2.0 * h);
    };
    double d1 = d(0), d2 = d(1), d3 = d(2), d4 = d(3);
    double p1 = d3;    // p1 = d3 p4
    double p3 = -d1;   // p3 = -d1 p4
    r1[t] = d1 + p3;           // dx1 component (vanishes by construction)
    r2[t] = d2 - x[0] * p1;    // dx2 component: x1 p1 = d2 p4
    r3[t] = d3 - p1;           // dx3 component (vanishes by construction)
    r4[t] = d4;                // dx4 component: d4 p4 = 0
  });

  GeneratorCheckReport rep;
  for (std::int64_t t = 0; t < total; ++t) {
    rep.constraint_dx1 = std::max(rep.constraint_dx1, std::abs(r1[t]));
    rep.constraint_dx2 = std::max(rep.constraint_dx2, std::abs(r2[t]));
    rep.constraint_dx3 = std::max(rep.constraint_dx3, std::abs(r3[t]));
    rep.constraint_dx4 = std::max(rep.constraint_dx4, std::abs(r4[t]));
  }
  rep.max_residual = std::max({rep.constraint_dx1, rep.constraint_dx2, rep.constraint_dx3,
                               rep.constraint_dx4});
  if (rep.constraint_dx1 > viol_tol) rep.violated.push_back("p3 = -d(p4)/dx1");
  if (rep.constraint_dx2 > viol_tol) rep.violated.push_back("x1*p1 = d(p4)/dx2");
  if (rep.constraint_dx3 > viol_tol) rep.violated.push_back("p1 = d(p4)/dx3");
  if (rep.constraint_dx4 > viol_tol) rep.violated.push_back("d(p4)/dx4 = 0");
  rep.pass = rep.violated.empty();
  return rep;
}

}  // namespace carnot
