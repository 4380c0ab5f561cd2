#include "carnot/symplectic.hpp"

#include <cmath>

#include "carnot/extension.hpp"

namespace carnot {

MatrixXd standard_symplectic_matrix(int n) {
  MatrixXd J = MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    J(i, n + i) = 1.0;
    J(n + i, i) = -1.0;
  }
  return J;
}

SymplecticStructure standard_structure(int n) {
  if (n < 1) throw domain_error("standard_structure: n >= 1");
  return {n, false, {standard_symplectic_matrix(n)}};
}

SymplecticStructure quaternionic_structure(int n) {
  if (n < 1) throw domain_error("quaternionic_structure: n >= 1");
  const int d = 4 * n;
  auto X = [&](int i) { return i; };
  auto Y = [&](int i) { return n + i; };
  auto Z = [&](int i) { return 2 * n + i; };
  auto W = [&](int i) { return 3 * n + i; };
  MatrixXd J1 = MatrixXd::Zero(d, d), J2 = MatrixXd::Zero(d, d), J3 = MatrixXd::Zero(d, d);
  auto put = [](MatrixXd& J, int a, int b, double c) {
    J(a, b) += c;
    J(b, a) -= c;
  };
  for (int i = 0; i < n; ++i) {
    put(J1, X(i), Y(i), 1.0);
    put(J1, Z(i), W(i), 1.0);
    put(J2, X(i), Z(i), 1.0);
    put(J2, W(i), Y(i), 1.0);
    put(J3, W(i), X(i), 1.0);
    put(J3, Z(i), Y(i), 1.0);
  }
  return {n, true, {J1, J2, J3}};
}

double symplectic_defect(const MatrixXd& A, const MatrixXd& J, double lambda) {
  if (A.rows() != A.cols() || J.rows() != J.cols() || A.rows() != J.rows())
    throw structural_error("symplectic_defect: dimension mismatch");
  if (A.rows() % 2 != 0) throw structural_error("symplectic_defect: odd dimension");
  return (A.transpose() * J * A - lambda * J).cwiseAbs().maxCoeff();
}

double lambda_from_det(const MatrixXd& A, int n) {
  if (n < 1) throw domain_error("lambda_from_det: n >= 1");
  double det = A.determinant();
  if (det < 0.0 && n % 2 == 0)
    throw domain_error("lambda_from_det: negative determinant with even n");
  if (det == 0.0) return 0.0;
  double mag = std::pow(std::abs(det), 1.0 / double(n));
  return det < 0.0 ? -mag : mag;
}

RigidityReport quaternionic_rigidity_check(const MatrixXd& A, double tau) {
  if (A.rows() != A.cols() || A.rows() % 4 != 0)
    throw structural_error("quaternionic_rigidity_check: need a 4n x 4n matrix");
  int n = int(A.rows()) / 4;
  if (std::abs(A.determinant()) < 1e-14)
    throw structural_error("quaternionic_rigidity_check: singular matrix");
  auto S = quaternionic_structure(n);
  RigidityReport rep;
  rep.tau = tau;
  rep.c = 100.0;
  rep.r1 = symplectic_defect(A, S.J[0], 1.0);
  rep.r2 = symplectic_defect(A, S.J[1], 1.0);
  rep.r3 = symplectic_defect(A, S.J[2], 1.0);
  rep.orthogonality = (A * A.transpose() - MatrixXd::Identity(4 * n, 4 * n)).cwiseAbs().maxCoeff();
  rep.premise = rep.r1 < tau && rep.r2 < tau;
  rep.pass = !rep.premise || (rep.r3 < rep.c * tau && rep.orthogonality < rep.c * tau);
  return rep;
}

// ---- sampled forms ----

namespace {

// shared multilinear interpolation over the SampledMap grid layout
template <class T, class Get>
T interp(const Box& box, const std::vector<int>& res, const Get& get, const VectorXd& x,
         const T& zero) {
  const int d = box.dim();
  std::vector<int> base(d);
  std::vector<double> frac(d);
  for (int a = 0; a < d; ++a) {
    double h = (box.hi[a] - box.lo[a]) / double(res[a] - 1);
    double rel = (x[a] - box.lo[a]) / h;
    if (rel < -1e-9 || rel > res[a] - 1 + 1e-9)
      throw chart_exit_error("form evaluation outside the sampled chart");
    int cell = std::max(0, std::min(int(std::floor(rel)), res[a] - 2));
    base[a] = cell;
    frac[a] = rel - cell;
  }
  T acc = zero;
  std::vector<int> idx(d);
  for (int c = 0; c < (1 << d); ++c) {
    double w = 1.0;
    for (int a = 0; a < d; ++a) {
      int bit = (c >> a) & 1;
      idx[a] = base[a] + bit;
      w *= bit ? frac[a] : 1.0 - frac[a];
    }
    if (w == 0.0) continue;
    std::int64_t flat = 0;
    for (int a = 0; a < d; ++a) flat = flat * res[a] + idx[a];
    acc += w * get(flat);
  }
  return acc;
}

std::int64_t count_nodes(const std::vector<int>& res) {
  std::int64_t n = 1;
  for (int r : res) n *= r;
  return n;
}

VectorXd coords_of(const Box& box, const std::vector<int>& res, std::int64_t flat) {
  const int d = box.dim();
  VectorXd x(d);
  std::vector<int> idx(d);
  for (int a = d - 1; a >= 0; --a) {
    idx[a] = int(flat % res[a]);
    flat /= res[a];
  }
  for (int a = 0; a < d; ++a)
    x[a] = box.lo[a] + (box.hi[a] - box.lo[a]) * idx[a] / double(res[a] - 1);
  return x;
}

}  // namespace

VectorXd SampledOneForm::eval(const VectorXd& x) const {
  return interp<VectorXd>(box, res, [&](std::int64_t f) { return values[size_t(f)]; }, x,
                          VectorXd::Zero(box.dim()));
}
std::int64_t SampledOneForm::nodes() const { return count_nodes(res); }
VectorXd SampledOneForm::node_coords(std::int64_t flat) const { return coords_of(box, res, flat); }

MatrixXd SampledTwoForm::eval(const VectorXd& x) const {
  return interp<MatrixXd>(box, res, [&](std::int64_t f) { return values[size_t(f)]; }, x,
                          MatrixXd::Zero(box.dim(), box.dim()));
}
std::int64_t SampledTwoForm::nodes() const { return count_nodes(res); }
VectorXd SampledTwoForm::node_coords(std::int64_t flat) const { return coords_of(box, res, flat); }

SampledOneForm poincare_primitive(const SampledTwoForm& eta, PrimitiveReport* report) {
  const int d = eta.box.dim();
  const std::int64_t N = eta.nodes();

  // closedness of the input: components of d eta on the interior grid
  auto idx_of = [&](std::int64_t flat) {
    std::vector<int> idx(d);
    std::int64_t f = flat;
    for (int a = d - 1; a >= 0; --a) {
      idx[a] = int(f % eta.res[a]);
      f /= eta.res[a];
    }
    return idx;
  };
  auto flat_of = [&](const std::vector<int>& idx) {
    std::int64_t f = 0;
    for (int a = 0; a < d; ++a) f = f * eta.res[a] + idx[a];
    return f;
  };
  auto step = [&](int a) { return (eta.box.hi[a] - eta.box.lo[a]) / double(eta.res[a] - 1); };

  double closedness = 0.0;
  for (std::int64_t t = 0; t < N; ++t) {
    auto idx = idx_of(t);
    bool interior = true;
    for (int a = 0; a < d; ++a)
      if (idx[a] == 0 || idx[a] == eta.res[a] - 1) interior = false;
    if (!interior) continue;
    auto deriv = [&](int a, int r, int c) {
      auto up = idx, dn = idx;
      up[a] += 1;
      dn[a] -= 1;
      return (eta.values[size_t(flat_of(up))](r, c) - eta.values[size_t(flat_of(dn))](r, c)) /
             (2.0 * step(a));
    };
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        for (int k = j + 1; k < d; ++k) {
          double val = deriv(i, j, k) - deriv(j, i, k) + deriv(k, i, j);
          closedness = std::max(closedness, std::abs(val));
        }
  }
  double scale = 0.0;
  for (const auto& m : eta.values) scale = std::max(scale, m.cwiseAbs().maxCoeff());
  if (closedness > 1e-6 * (1.0 + scale))
    throw domain_error("poincare_primitive: input 2-form is not closed at tolerance");

  // radial homotopy about the chart center, 16-point Gauss-Legendre in t
  static const double gl_x[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                 0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                 0.9445750230732326, 0.9894009349916499};
  static const double gl_w[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                 0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                 0.0622535239386479, 0.0271524594117541};
  VectorXd c = eta.box.center();

  SampledOneForm alpha;
  alpha.box = eta.box;
  alpha.res = eta.res;
  alpha.values.assign(size_t(N), VectorXd::Zero(d));
  parallel_for(N, [&](std::int64_t t) {
    VectorXd x = eta.node_coords(t);
    VectorXd r = x - c;
    VectorXd acc = VectorXd::Zero(d);
    for (int q = 0; q < 16; ++q) {
      double tt = 0.5 + 0.5 * (q < 8 ? gl_x[q] : -gl_x[q - 8]);
      double ww = 0.5 * gl_w[q % 8];
      MatrixXd E = eta.eval(c + tt * r);
      acc += ww * tt * (E.transpose() * r);  // alpha_j = int t eta(i,j) r_i
    }
    alpha.values[size_t(t)] = acc;
  });

  if (report) {
    report->d_input_residual = closedness;
    double resid = 0.0;
    for (std::int64_t t = 0; t < N; ++t) {
      auto idx = idx_of(t);
      bool interior = true;
      for (int a = 0; a < d; ++a)
        if (idx[a] == 0 || idx[a] == eta.res[a] - 1) interior = false;
      if (!interior) continue;
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
          auto up_i = idx, dn_i = idx, up_j = idx, dn_j = idx;
          up_i[i] += 1;
          dn_i[i] -= 1;
          up_j[j] += 1;
          dn_j[j] -= 1;
          double dai = (alpha.values[size_t(flat_of(up_i))][j] -
                        alpha.values[size_t(flat_of(dn_i))][j]) /
                       (2.0 * step(i));
          double daj = (alpha.values[size_t(flat_of(up_j))][i] -
                        alpha.values[size_t(flat_of(dn_j))][i]) /
                       (2.0 * step(j));
          resid = std::max(resid, std::abs(dai - daj - eta.values[size_t(t)](i, j)));
        }
    }
    report->d_residual = resid;
  }
  return alpha;
}

// ---- Moser correction ----

static SampledMap moser_impl(const SampledMap& f, MoserReport* report, const MoserOptions& opt,
                             bool parallel) {
  const int d = f.in_dim();
  if (d % 2 != 0 || f.out_dim() != d)
    throw structural_error("moser_correct: need a sampled map R^2n -> R^2n");
  const int n = d / 2;
  MatrixXd Omega = standard_symplectic_matrix(n);

  // eta = f^* omega - omega on the grid (one-sided stencils at the boundary)
  SampledTwoForm eta;
  eta.box = f.box();
  eta.res = f.resolution();
  eta.values.assign(size_t(f.node_count()), MatrixXd::Zero(d, d));
  auto jac_node = [&](std::int64_t t) {
    auto idx = f.multi_index(t);
    MatrixXd J(d, d);
    for (int a = 0; a < d; ++a) {
      double h = f.grid_step(a);
      auto up = idx, dn = idx;
      if (idx[a] == 0) {
        auto mid = idx, far = idx;
        mid[a] += 1;
        far[a] += 2;
        J.col(a) = (-3.0 * f.node_value(f.flat_index(idx)) +
                    4.0 * f.node_value(f.flat_index(mid)) - f.node_value(f.flat_index(far))) /
                   (2.0 * h);
      } else if (idx[a] == f.resolution()[a] - 1) {
        auto mid = idx, far = idx;
        mid[a] -= 1;
        far[a] -= 2;
        J.col(a) = (3.0 * f.node_value(f.flat_index(idx)) -
                    4.0 * f.node_value(f.flat_index(mid)) + f.node_value(f.flat_index(far))) /
                   (2.0 * h);
      } else {
        up[a] += 1;
        dn[a] -= 1;
        J.col(a) =
            (f.node_value(f.flat_index(up)) - f.node_value(f.flat_index(dn))) / (2.0 * h);
      }
    }
    return J;
  };
  double eta_norm = 0.0;
  for (std::int64_t t = 0; t < f.node_count(); ++t) {
    MatrixXd J = jac_node(t);
    eta.values[size_t(t)] = J.transpose() * Omega * J - Omega;
    eta_norm = std::max(eta_norm, eta.values[size_t(t)].cwiseAbs().maxCoeff());
  }

  // nondegeneracy guard on omega_t = omega + t eta
  double pf_min = std::numeric_limits<double>::infinity();
  for (std::int64_t t = 0; t < f.node_count(); ++t)
    for (int s = 0; s <= 8; ++s) {
      double tt = double(s) / 8.0;
      pf_min = std::min(pf_min, std::abs(top_wedge_coefficient(Omega + tt * eta.values[size_t(t)])));
    }
  if (pf_min <= opt.pf_guard)
    throw domain_error("moser_correct: omega_t degenerates (Pfaffian guard)");

  PrimitiveReport prim;
  SampledOneForm alpha = poincare_primitive(eta, &prim);

  // non-autonomous flow of iota_X omega_t = -alpha, integrated to t = 1
  SampledMap g(f.box(), f.resolution(), d);
  auto flow_body = [&](std::int64_t t) {
    VectorXd x = f.node_coords(t);
    auto field = [&](const VectorXd& y, double tt) {
      MatrixXd W = Omega + tt * eta.eval(y);
      return VectorXd(W.partialPivLu().solve(alpha.eval(y)));
    };
    double h = 1.0 / double(opt.flow_steps);
    for (int s = 0; s < opt.flow_steps; ++s) {
      double tt = s * h;
      VectorXd k1 = field(x, tt);
      VectorXd k2 = field(x + 0.5 * h * k1, tt + 0.5 * h);
      VectorXd k3 = field(x + 0.5 * h * k2, tt + 0.5 * h);
      VectorXd k4 = field(x + h * k3, tt + h);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    g.node_value(t) = f.eval(x);  // g = f o Psi
  };
  if (parallel)
    parallel_for(f.node_count(), flow_body);
  else
    serial_for(f.node_count(), flow_body);

  if (report) {
    report->eta_norm = eta_norm;
    report->pf_min = pf_min;
    report->primitive_residual = prim.d_residual;
    double corrected = 0.0;
    for (std::int64_t t = 0; t < g.node_count(); ++t) {
      if (!g.interior(t)) continue;
      MatrixXd J = g.jacobian_at_node(g.multi_index(t));
      corrected = std::max(corrected, (J.transpose() * Omega * J - Omega).cwiseAbs().maxCoeff());
    }
    report->corrected_norm = corrected;
    report->reduced_100x = corrected <= eta_norm / 100.0 + 1e-14;
  }
  return g;
}

SampledMap moser_correct(const SampledMap& f_eps, MoserReport* report, const MoserOptions& opt) {
  return moser_impl(f_eps, report, opt, opt.parallel);
}
SampledMap moser_correct_serial(const SampledMap& f_eps, MoserReport* report,
                                const MoserOptions& opt) {
  return moser_impl(f_eps, report, opt, false);
}

AreaCheckReport area_preserving_check(const SampledMap& f) {
  if (f.in_dim() != 2 || f.out_dim() != 2)
    throw structural_error("area_preserving_check: plane maps only");
  AreaCheckReport rep;
  for (std::int64_t t = 0; t < f.node_count(); ++t) {
    if (!f.interior(t)) continue;
    MatrixXd J = f.jacobian_at_node(f.multi_index(t));
    rep.max_det_defect = std::max(rep.max_det_defect, std::abs(J.determinant() - 1.0));
  }
  // measure comparison on concentric probe rectangles
  VectorXd c = f.box().center();
  VectorXd half = 0.5 * (f.box().hi - f.box().lo);
  for (double rel : {0.25, 0.5, 0.75}) {
    VectorXd h = rel * half;
    const int m = 200;  // boundary samples per side
    std::vector<VectorXd> img;
    auto push = [&](double x, double y) {
      VectorXd p(2);
      p << c[0] + x, c[1] + y;
      img.push_back(f.eval(p));
    };
    for (int i = 0; i < m; ++i) push(-h[0] + 2 * h[0] * i / m, -h[1]);
    for (int i = 0; i < m; ++i) push(h[0], -h[1] + 2 * h[1] * i / m);
    for (int i = 0; i < m; ++i) push(h[0] - 2 * h[0] * i / m, h[1]);
    for (int i = 0; i < m; ++i) push(-h[0], h[1] - 2 * h[1] * i / m);
    double area = 0.0;
    for (size_t i = 0; i < img.size(); ++i) {
      const VectorXd& a = img[i];
      const VectorXd& b = img[(i + 1) % img.size()];
      area += 0.5 * (a[0] * b[1] - b[0] * a[1]);
    }
    double ratio = std::abs(area) / (4.0 * h[0] * h[1]);
    rep.probe_ratios.push_back(ratio);
    rep.max_ratio_defect = std::max(rep.max_ratio_defect, std::abs(ratio - 1.0));
  }
  return rep;
}

}  // namespace carnot
