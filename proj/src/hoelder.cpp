#include "carnot/hoelder.hpp"

#include <algorithm>
#include <numeric>

namespace carnot {

double weierstrass(double y, int N) {
  if (N < 0) throw domain_error("weierstrass: N must be >= 0");
  double acc = 0.0, amp = 1.0, freq = M_PI;
  for (int n = 0; n <= N; ++n) {
    acc += amp * std::cos(freq * y);
    amp /= 9.0;
    freq *= 27.0;
  }
  return acc;
}

double weierstrass_antiderivative(double y, int N) {
  if (N < 0) throw domain_error("weierstrass: N must be >= 0");
  double acc = 0.0, amp = 1.0, freq = M_PI;
  for (int n = 0; n <= N; ++n) {
    acc += amp * std::sin(freq * y) / freq;
    amp /= 9.0;
    freq *= 27.0;
  }
  return acc;
}

double weierstrass_tail_bound(int N) { return std::pow(1.0 / 9.0, N + 1) / (1.0 - 1.0 / 9.0); }

// ---- mollifier ----

MollifierKernel MollifierKernel::standard(const StratifiedAlgebra& alg, int nodes_per_axis) {
  alg.ensure_valid();
  const int d = alg.dim();
  if (nodes_per_axis < 3 || nodes_per_axis % 2 == 0)
    throw domain_error("kernel needs an odd node count >= 3");
  double total_nodes = std::pow(double(nodes_per_axis), d);
  if (total_nodes > 6.0e6)
    throw domain_error("kernel quadrature too large for this dimension; lower nodes_per_axis");

  // rho(u) = sum over coordinates of (n_c |u_i|^(1/w_i))^(2M), a polynomial
  // because w_i divides M = lcm(1..step); support box |u_i| <= (1/n_c)^{w_i}.
  int M = 1;
  for (int l = 2; l <= alg.step(); ++l) M = std::lcm(M, l);
  const double nc = double(d);

  std::vector<double> half(d);
  for (int i = 0; i < d; ++i) half[i] = std::pow(1.0 / nc, alg.weight(i));

  MollifierKernel k;
  k.alg_ = &alg;
  k.nodes_per_axis_ = nodes_per_axis;
  std::vector<VectorXd> offs;
  std::vector<double> wts;
  std::vector<int> idx(d, 0);
  const int n = nodes_per_axis;
  VectorXd u(d);
  while (true) {
    double cellw = 1.0;
    for (int a = 0; a < d; ++a) {
      double h = 2.0 * half[a] / n;
      u[a] = -half[a] + (idx[a] + 0.5) * h;
      cellw *= h;
    }
    double rho = 0.0;
    for (int a = 0; a < d; ++a)
      rho += std::pow(nc * std::pow(std::abs(u[a]), 1.0 / alg.weight(a)), 2.0 * M);
    if (rho < 1.0) {
      double prof = std::exp(-1.0 / (1.0 - rho));
      if (prof > 0.0) {
        offs.push_back(u);
        wts.push_back(prof * cellw);
      }
    }
    int a = d - 1;
    while (a >= 0 && ++idx[a] == n) idx[a--] = 0;
    if (a < 0) break;
  }
  if (offs.empty()) throw domain_error("kernel quadrature produced no interior nodes");
  double mass = std::accumulate(wts.begin(), wts.end(), 0.0);
  k.offsets_.resize(int(offs.size()), d);
  k.weights_.resize(int(offs.size()));
  for (size_t q = 0; q < offs.size(); ++q) {
    k.offsets_.row(int(q)) = offs[q].transpose();
    k.weights_[int(q)] = wts[q] / mass;
  }
  return k;
}

VectorXd MollifierKernel::scaled_offset(int q, double eps) const {
  VectorXd u = offsets_.row(q).transpose();
  for (int a = 0; a < u.size(); ++a) u[a] *= std::pow(eps, alg_->weight(a));
  return u;
}

std::string MollifierKernel::describe() const {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "compact smooth bump on the unit quasi-metric ball (heat kernel replaced by a "
                "dilation-scaled bump), %d nodes/axis, %d quadrature points",
                nodes_per_axis_, nodes());
  return buf;
}

MapFn mollified_map(const MapFn& f, const StratifiedAlgebra& alg, double eps,
                    const MollifierKernel& kernel) {
  if (!(eps > 0.0)) throw domain_error("mollified_map: eps must be positive");
  // precompute the group offsets (delta_eps u_q)^{-1}
  const int Q = kernel.nodes();
  std::vector<VectorXd> inv_offsets(Q);
  for (int q = 0; q < Q; ++q) inv_offsets[q] = -kernel.scaled_offset(q, eps);
  VectorXd w = kernel.weights();
  const StratifiedAlgebra* A = &kernel.algebra();
  (void)alg;
  return [f, inv_offsets, w, A](const VectorXd& x) {
    VectorXd acc;
    for (size_t q = 0; q < inv_offsets.size(); ++q) {
      VectorXd y = f(A->multiply(x, inv_offsets[q]));
      if (q == 0)
        acc = w[0] * y;
      else
        acc += w[int(q)] * y;
    }
    return acc;
  };
}

static SampledMap group_convolve_impl(const MapFn& f, const StratifiedAlgebra& alg, double eps,
                                      const MollifierKernel& kernel, const Box& out_box,
                                      const std::vector<int>& out_res, int out_dim,
                                      bool parallel) {
  MapFn fe = mollified_map(f, alg, eps, kernel);
  SampledMap out(out_box, out_res, out_dim);
  auto body = [&](std::int64_t i) { out.node_value(i) = fe(out.node_coords(i)); };
  if (parallel)
    parallel_for(out.node_count(), body);
  else
    serial_for(out.node_count(), body);
  return out;
}

SampledMap group_convolve(const MapFn& f, const StratifiedAlgebra& alg, double eps,
                          const MollifierKernel& kernel, const Box& out_box,
                          const std::vector<int>& out_res, int out_dim) {
  return group_convolve_impl(f, alg, eps, kernel, out_box, out_res, out_dim, true);
}

SampledMap group_convolve_serial(const MapFn& f, const StratifiedAlgebra& alg, double eps,
                                 const MollifierKernel& kernel, const Box& out_box,
                                 const std::vector<int>& out_res, int out_dim) {
  return group_convolve_impl(f, alg, eps, kernel, out_box, out_res, out_dim, false);
}

// ---- pullback pairing ----

double pullback_derivative(const MapFn& f_eps, const StratifiedAlgebra& domain,
                           const StratifiedAlgebra& target, int omega_index, int x_index,
                           const VectorXd& p, double fd_step) {
  if (omega_index < 0 || omega_index >= target.dim())
    throw domain_error("pullback_derivative: omega index out of range");
  if (x_index < 0 || x_index >= domain.dim())
    throw domain_error("pullback_derivative: frame index out of range");
  MatrixXd J = numeric_jacobian(f_eps, p, fd_step);
  VectorXd img = f_eps(p);
  VectorXd row = target.contact_coframe(img).row(omega_index).transpose();
  VectorXd X = domain.left_invariant_frame(p).col(x_index);
  return row.dot(J * X);
}

double pullback_derivative(const SampledMap& f_eps, const StratifiedAlgebra& domain,
                           const StratifiedAlgebra& target, int omega_index, int x_index,
                           const VectorXd& p) {
  MatrixXd J = f_eps.jacobian(p);
  VectorXd img = f_eps.eval(p);
  VectorXd row = target.contact_coframe(img).row(omega_index).transpose();
  VectorXd X = domain.left_invariant_frame(p).col(x_index);
  return row.dot(J * X);
}

DecayResult decay_slope(const MapFn& f, const StratifiedAlgebra& domain,
                        const StratifiedAlgebra& target, int omega_index, int x_index,
                        const std::vector<double>& eps_grid, const std::vector<VectorXd>& probes,
                        const MollifierKernel& kernel, const DecayOptions& opt) {
  if (eps_grid.size() < 4) throw domain_error("decay_slope: need at least 4 eps values");
  if (probes.empty()) throw domain_error("decay_slope: need probe points");

  DecayResult res;
  res.kernel_info = kernel.describe();
  res.certifies = opt.beta > 0.5;
  res.in_weight_regime = target.weight(omega_index) > domain.weight(x_index);

  const int ne = int(eps_grid.size());
  const int np = int(probes.size());
  std::vector<double> vals(size_t(ne) * np, 0.0);
  std::vector<MapFn> mollys(ne);
  for (int e = 0; e < ne; ++e) mollys[e] = mollified_map(f, domain, eps_grid[e], kernel);
  parallel_for(std::int64_t(ne) * np, [&](std::int64_t t) {
    int e = int(t / np), pidx = int(t % np);
    double step = opt.fd_step_factor * eps_grid[e];
    vals[size_t(t)] = std::abs(
        pullback_derivative(mollys[e], domain, target, omega_index, x_index, probes[pidx], step));
  });
  for (int e = 0; e < ne; ++e) {
    double sup = 0.0;
    for (int pI = 0; pI < np; ++pI) sup = std::max(sup, vals[size_t(e) * np + pI]);
    res.points.push_back({eps_grid[e], sup});
  }

  // Fit window: drop the extremes when enough scales are supplied.
  std::vector<DecayPoint> pts = res.points;
  std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.eps < b.eps; });
  if (int(pts.size()) >= 8 && opt.trim > 0) {
    pts.erase(pts.begin(), pts.begin() + opt.trim);
    pts.erase(pts.end() - opt.trim, pts.end());
  }
  double floor = 1e-13;
  int live = 0;
  for (auto& p : pts)
    if (p.sup > floor) ++live;
  if (live < 2) {
    res.at_noise_floor = true;
    res.slope = 0.0;
    return res;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (auto& p : pts) {
    if (p.sup <= floor) continue;
    double x = std::log(p.eps), y = std::log(p.sup);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  double denom = m * sxx - sx * sx;
  res.slope = (m * sxy - sx * sy) / denom;
  double icept = (sy - res.slope * sx) / m;
  double rss = 0;
  for (auto& p : pts) {
    if (p.sup <= floor) continue;
    double pred = res.slope * std::log(p.eps) + icept;
    rss += (std::log(p.sup) - pred) * (std::log(p.sup) - pred);
  }
  res.fit_residual = std::sqrt(rss / m);
  return res;
}

double hoelder_seminorm(const MapFn& f, const StratifiedAlgebra& domain,
                        const StratifiedAlgebra& target, const Box& chart, double beta,
                        int pair_budget, std::uint64_t seed, double max_separation) {
  if (!(beta > 0.0 && beta <= 1.0)) throw domain_error("hoelder_seminorm: beta outside (0,1]");
  if (pair_budget < 1) throw domain_error("hoelder_seminorm: empty pair budget");
  Rng rng(seed ^ 0xc0ffee);
  const int d = chart.dim();
  VectorXd span = chart.hi - chart.lo;
  const int n_scales = 8;  // separations span >= 2 decades
  double best = 0.0;
  for (int t = 0; t < pair_budget; ++t) {
    VectorXd x(d), y(d);
    for (int a = 0; a < d; ++a) x[a] = rng.uniform(chart.lo[a], chart.hi[a]);
    double scale = std::pow(10.0, -2.5 * double(t % n_scales) / (n_scales - 1));
    for (int a = 0; a < d; ++a) {
      double off = scale * span[a] * 0.5 * (2.0 * rng.uniform() - 1.0);
      y[a] = std::min(chart.hi[a], std::max(chart.lo[a], x[a] + off));
    }
    double dx = domain.quasi_metric(x, y);
    if (dx <= 1e-14 || dx > max_separation) continue;
    double dy = target.quasi_metric(f(x), f(y));
    best = std::max(best, dy / std::pow(dx, beta));
  }
  return best;
}

YoungResult young_integral(const std::function<double(double)>& f,
                           const std::function<double(double)>& g, double a, double b,
                           double alpha, double beta, int level_min, int level_max) {
  if (!(alpha + beta > 1.0))
    throw domain_error("young_integral: declared exponents need alpha + beta > 1");
  if (level_min < 0 || level_max < level_min || level_max > 24)
    throw domain_error("young_integral: bad level range");

  // sample both paths once at the finest needed dyadic grid (midpoints of the
  // deepest level live one level further down)
  const int base = level_max + 1;
  const std::int64_t n = (std::int64_t(1) << base);
  std::vector<double> fv(size_t(n) + 1), gv(size_t(n) + 1);
  parallel_for(n + 1, [&](std::int64_t i) {
    double t = a + (b - a) * double(i) / double(n);
    fv[size_t(i)] = f(t);
    gv[size_t(i)] = g(t);
  });

  YoungResult out;
  double prev = 0.0;
  for (int L = level_min; L <= level_max; ++L) {
    const std::int64_t cells = (std::int64_t(1) << L);
    const std::int64_t stride = n / cells;
    double S = 0.0;
    for (std::int64_t c = 0; c < cells; ++c) {
      std::int64_t i0 = c * stride, i1 = (c + 1) * stride, im = i0 + stride / 2;
      S += fv[size_t(im)] * (gv[size_t(i1)] - gv[size_t(i0)]);
    }
    out.levels.push_back(L);
    out.level_values.push_back(S);
    if (L > level_min) out.deltas.push_back(std::abs(S - prev));
    prev = S;
  }
  out.value = out.level_values.back();
  return out;
}

}  // namespace carnot
