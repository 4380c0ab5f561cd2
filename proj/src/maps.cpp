#include "carnot/maps.hpp"

#include <cmath>
#include <sstream>

#include "carnot/hoelder.hpp"

namespace carnot {

bool Box::contains(const VectorXd& x, double tol) const {
  for (int i = 0; i < dim(); ++i)
    if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
  return true;
}

Box Box::shrunk(const VectorXd& margin) const {
  Box b{lo + margin, hi - margin};
  for (int i = 0; i < dim(); ++i)
    if (!(b.lo[i] < b.hi[i])) throw domain_error("box margin leaves an empty chart");
  return b;
}

SampledMap::SampledMap(Box box, std::vector<int> resolution, int out_dim)
    : box_(std::move(box)), res_(std::move(resolution)), out_dim_(out_dim) {
  if (int(res_.size()) != box_.dim()) throw input_error("resolution rank != box dimension");
  nodes_ = 1;
  for (int r : res_) {
    if (r < 2) throw input_error("grid needs at least 2 nodes per axis");
    nodes_ *= r;
  }
  values_.assign(size_t(nodes_), VectorXd::Zero(out_dim_));
}

SampledMap SampledMap::sample(const MapFn& f, const Box& box, const std::vector<int>& resolution,
                              int out_dim) {
  SampledMap m(box, resolution, out_dim);
  for (std::int64_t i = 0; i < m.nodes_; ++i) {
    VectorXd y = f(m.node_coords(i));
    if (!y.allFinite()) throw domain_error("sample: non-finite map value at a grid node");
    m.values_[size_t(i)] = y;
  }
  return m;
}

double SampledMap::grid_step(int axis) const {
  return (box_.hi[axis] - box_.lo[axis]) / double(res_[axis] - 1);
}

VectorXd SampledMap::node_coords(std::int64_t flat) const {
  std::vector<int> idx = multi_index(flat);
  VectorXd x(box_.dim());
  for (int a = 0; a < box_.dim(); ++a) x[a] = box_.lo[a] + grid_step(a) * idx[a];
  return x;
}

std::int64_t SampledMap::flat_index(const std::vector<int>& idx) const {
  std::int64_t f = 0;
  for (int a = 0; a < int(res_.size()); ++a) f = f * res_[a] + idx[a];
  return f;
}

std::vector<int> SampledMap::multi_index(std::int64_t flat) const {
  std::vector<int> idx(res_.size());
  for (int a = int(res_.size()) - 1; a >= 0; --a) {
    idx[a] = int(flat % res_[a]);
    flat /= res_[a];
  }
  return idx;
}

bool SampledMap::interior(std::int64_t flat, int stencil) const {
  auto idx = multi_index(flat);
  for (int a = 0; a < int(res_.size()); ++a)
    if (idx[a] < stencil || idx[a] >= res_[a] - stencil) return false;
  return true;
}

VectorXd SampledMap::eval(const VectorXd& x) const {
  if (x.size() != box_.dim()) throw structural_error("SampledMap::eval: wrong dimension");
  const int d = box_.dim();
  std::vector<int> base(d);
  std::vector<double> frac(d);
  for (int a = 0; a < d; ++a) {
    double h = grid_step(a);
    double rel = (x[a] - box_.lo[a]) / h;
    if (rel < -1e-9 || rel > res_[a] - 1 + 1e-9)
      throw chart_exit_error("evaluation outside the sampled chart");
    int cell = int(std::floor(rel));
    cell = std::max(0, std::min(cell, res_[a] - 2));
    base[a] = cell;
    frac[a] = rel - cell;
  }
  VectorXd acc = VectorXd::Zero(out_dim_);
  std::vector<int> idx(d);
  const int corners = 1 << d;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    for (int a = 0; a < d; ++a) {
      int bit = (c >> a) & 1;
      idx[a] = base[a] + bit;
      w *= bit ? frac[a] : (1.0 - frac[a]);
    }
    if (w != 0.0) acc += w * values_[size_t(flat_index(idx))];
  }
  return acc;
}

MapFn SampledMap::fn() const {
  SampledMap copy = *this;
  return [copy](const VectorXd& x) { return copy.eval(x); };
}

MatrixXd SampledMap::jacobian_at_node(const std::vector<int>& idx) const {
  MatrixXd J(out_dim_, box_.dim());
  for (int a = 0; a < box_.dim(); ++a) {
    if (idx[a] < 1 || idx[a] > res_[a] - 2)
      throw chart_exit_error("jacobian stencil exits the chart");
    auto up = idx, dn = idx;
    up[a] += 1;
    dn[a] -= 1;
    J.col(a) =
        (values_[size_t(flat_index(up))] - values_[size_t(flat_index(dn))]) / (2.0 * grid_step(a));
  }
  return J;
}

MatrixXd SampledMap::jacobian(const VectorXd& x) const {
  MatrixXd J(out_dim_, box_.dim());
  for (int a = 0; a < box_.dim(); ++a) {
    double h = grid_step(a);
    VectorXd xp = x, xm = x;
    xp[a] += h;
    xm[a] -= h;
    J.col(a) = (eval(xp) - eval(xm)) / (2.0 * h);
  }
  return J;
}

MatrixXd numeric_jacobian(const MapFn& f, const VectorXd& x, double step) {
  VectorXd y0 = f(x);
  MatrixXd J(y0.size(), x.size());
  for (int a = 0; a < x.size(); ++a) {
    VectorXd xp = x, xm = x;
    xp[a] += step;
    xm[a] -= step;
    J.col(a) = (f(xp) - f(xm)) / (2.0 * step);
  }
  return J;
}

namespace {

std::vector<double> parse_numbers(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (...) {
      throw input_error("bad numeric list '" + s + "'");
    }
  }
  return out;
}

}  // namespace

NamedMap builtin_map(const std::string& name) {
  auto colon = name.find(':');
  std::string head = name.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : name.substr(colon + 1);

  if (head == "identity") {
    int d = arg.empty() ? 2 : std::stoi(arg);
    return {[](const VectorXd& x) { return x; }, d, d, name};
  }
  if (head == "parabolic-shear") {
    return {[](const VectorXd& x) {
              VectorXd y(2);
              y << x[0] + x[1] * x[1], x[1];
              return y;
            },
            2, 2, name};
  }
  if (head == "a2b") {
    return {[](const VectorXd& x) {
              VectorXd y(2);
              y << x[0] * x[0], x[1];
              return y;
            },
            2, 2, name};
  }
  if (head == "linear") {
    auto v = parse_numbers(arg);
    if (v.size() != 4) throw input_error("linear map needs 4 entries a,b,c,d");
    return {[v](const VectorXd& x) {
              VectorXd y(2);
              y << v[0] * x[0] + v[1] * x[1], v[2] * x[0] + v[3] * x[1];
              return y;
            },
            2, 2, name};
  }
  if (head == "weier1d") {
    int N = arg.empty() ? 6 : std::stoi(arg);
    return {[N](const VectorXd& x) {
              VectorXd y(1);
              y << weierstrass(x[0], N);
              return y;
            },
            1, 1, name};
  }
  if (head == "shear-weier") {
    int N = arg.empty() ? 6 : std::stoi(arg);
    return {[N](const VectorXd& x) {
              VectorXd y(2);
              y << x[0] + weierstrass(x[1], N), x[1];
              return y;
            },
            2, 2, name};
  }
  if (head == "shear-abs") {
    return {[](const VectorXd& x) {
              VectorXd y(2);
              y << x[0] + std::abs(x[1]), x[1];
              return y;
            },
            2, 2, name};
  }
  if (head == "lift-parabolic-shear") {
    return {[](const VectorXd& x) {
              VectorXd y(3);
              y << x[0] + x[1] * x[1], x[1], x[2] - x[1] * x[1] * x[1] / 6.0;
              return y;
            },
            3, 3, name};
  }
  if (head == "lift-shear-weier") {
    int N = arg.empty() ? 6 : std::stoi(arg);
    return {[N](const VectorXd& x) {
              double g = weierstrass(x[1], N);
              double G = weierstrass_antiderivative(x[1], N);
              VectorXd y(3);
              y << x[0] + g, x[1], x[2] + G - 0.5 * x[1] * g;
              return y;
            },
            3, 3, name};
  }
  if (head == "lift-shear-abs") {
    return {[](const VectorXd& x) {
              VectorXd y(3);
              y << x[0] + std::abs(x[1]), x[1], x[2];
              return y;
            },
            3, 3, name};
  }
  if (head == "lift-linear") {
    auto v = parse_numbers(arg);
    if (v.size() != 4) throw input_error("lift-linear map needs 4 entries a,b,c,d");
    double det = v[0] * v[3] - v[1] * v[2];
    return {[v, det](const VectorXd& x) {
              VectorXd y(3);
              y << v[0] * x[0] + v[1] * x[1], v[2] * x[0] + v[3] * x[1], det * x[2];
              return y;
            },
            3, 3, name};
  }
  if (head == "dilate2") {
    return {[](const VectorXd& x) {
              VectorXd y(3);
              y << 2.0 * x[0], 2.0 * x[1], 4.0 * x[2];
              return y;
            },
            3, 3, name};
  }
  throw input_error("unknown builtin map '" + name + "'");
}

}  // namespace carnot
