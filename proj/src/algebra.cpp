#include "carnot/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace carnot {

namespace {
int g_jobs = 0;
}  // namespace

void set_jobs(int jobs) { g_jobs = jobs < 0 ? 0 : jobs; }
int get_jobs() { return g_jobs; }

namespace {

std::string idx3(int i, int j, int k) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "(%d,%d,%d)", i + 1, j + 1, k + 1);
  return buf;
}

}  // namespace

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  if (ok() && warnings.empty()) {
    os << "ok";
    return os.str();
  }
  for (const auto& v : violations) {
    os << v.kind << " at (";
    for (size_t i = 0; i < v.indices.size(); ++i) os << (i ? "," : "") << v.indices[i];
    os << "): " << v.detail << "\n";
  }
  for (const auto& w : warnings) os << "warning: " << w << "\n";
  return os.str();
}

StratifiedAlgebra::StratifiedAlgebra(std::string name, std::vector<int> layer_dims,
                                     const std::vector<BracketEntry>& raw_brackets)
    : name_(std::move(name)), layer_dims_(std::move(layer_dims)), raw_(raw_brackets) {
  if (layer_dims_.empty()) throw input_error("algebra needs at least one layer");
  for (int d : layer_dims_)
    if (d < 0) throw input_error("negative layer dimension");
  step_ = int(layer_dims_.size());
  dim_ = 0;
  layer_offset_.resize(step_);
  for (int l = 0; l < step_; ++l) {
    layer_offset_[l] = dim_;
    dim_ += layer_dims_[l];
    for (int j = 0; j < layer_dims_[l]; ++j) weight_.push_back(l + 1);
  }
  if (dim_ == 0) throw input_error("zero-dimensional algebra");

  // Canonical table: key (i, j) with i < j; (j, i) synthesized by sign.
  // Conflicting raw data is kept out of the table and reported by validate().
  std::map<std::pair<int, int>, std::map<int, double>> agg;
  for (const auto& e : raw_brackets) {
    if (e.i < 0 || e.i >= dim_ || e.j < 0 || e.j >= dim_ || e.k < 0 || e.k >= dim_)
      throw input_error("bracket index out of range");
    if (e.i == e.j) continue;  // reported by validate when c != 0
    int i = e.i, j = e.j;
    double c = e.c;
    if (i > j) {
      std::swap(i, j);
      c = -c;
    }
    auto& slot = agg[{i, j}][e.k];
    slot = c;  // later normalized entries win; conflicts surface in validate()
  }
  for (auto& [ij, ks] : agg) {
    auto& vec = table_[ij];
    for (auto& [k, c] : ks)
      if (c != 0.0) vec.emplace_back(k, c);
    if (vec.empty()) table_.erase(ij);
  }
}

int StratifiedAlgebra::homogeneous_dim() const {
  int q = 0;
  for (int l = 0; l < step_; ++l) q += (l + 1) * layer_dims_[l];
  return q;
}

double StratifiedAlgebra::structure_constant(int i, int j, int k) const {
  if (i == j) return 0.0;
  double sign = 1.0;
  if (i > j) {
    std::swap(i, j);
    sign = -1.0;
  }
  auto it = table_.find({i, j});
  if (it == table_.end()) return 0.0;
  for (const auto& [kk, c] : it->second)
    if (kk == k) return sign * c;
  return 0.0;
}

VectorXd StratifiedAlgebra::bracket(const VectorXd& u, const VectorXd& v) const {
  check_dim(u, "bracket");
  check_dim(v, "bracket");
  VectorXd w = VectorXd::Zero(dim_);
  for (const auto& [ij, ks] : table_) {
    const double cross = u[ij.first] * v[ij.second] - u[ij.second] * v[ij.first];
    if (cross == 0.0) continue;
    for (const auto& [k, c] : ks) w[k] += c * cross;
  }
  return w;
}

ValidationReport StratifiedAlgebra::validate() const {
  ValidationReport rep;

  // Antisymmetry on the raw data: c_{ii} must vanish, and (i,j)/(j,i) pairs
  // must have opposite sign.
  std::map<std::tuple<int, int, int>, std::vector<double>> normalized;
  for (const auto& e : raw_) {
    if (e.i == e.j) {
      if (e.c != 0.0)
        rep.violations.push_back({"antisymmetry", {e.i + 1, e.j + 1, e.k + 1},
                                  "diagonal bracket [X_i, X_i] must vanish"});
      continue;
    }
    int i = e.i, j = e.j;
    double c = e.c;
    if (i > j) {
      std::swap(i, j);
      c = -c;
    }
    normalized[{i, j, e.k}].push_back(c);
  }
  for (const auto& [key, vals] : normalized) {
    for (size_t a = 1; a < vals.size(); ++a) {
      if (vals[a] != vals[0]) {
        auto [i, j, k] = key;
        rep.violations.push_back({"antisymmetry", {i + 1, j + 1, k + 1},
                                  "c^k_{ij} and c^k_{ji} are not opposite at " + idx3(i, j, k)});
        break;
      }
    }
  }

  // Grading (covers nilpotency: weight(k) <= step is forced by the basis).
  for (const auto& [ij, ks] : table_) {
    int wi = weight_[ij.first], wj = weight_[ij.second];
    for (const auto& [k, c] : ks) {
      if (c != 0.0 && weight_[k] != wi + wj) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "weight(%d)=%d but weight(%d)+weight(%d)=%d",
                      k + 1, weight_[k], ij.first + 1, ij.second + 1, wi + wj);
        rep.violations.push_back({"grading", {ij.first + 1, ij.second + 1, k + 1}, buf});
      }
    }
  }

  // Jacobi identity, checked numerically on all index triples.
  const double scale = [&] {
    double s = 1.0;
    for (const auto& [ij, ks] : table_)
      for (const auto& [k, c] : ks) s = std::max(s, std::abs(c));
    return s;
  }();
  for (int i = 0; i < dim_; ++i)
    for (int j = i + 1; j < dim_; ++j)
      for (int k = j + 1; k < dim_; ++k) {
        VectorXd ei = VectorXd::Unit(dim_, i), ej = VectorXd::Unit(dim_, j),
                 ek = VectorXd::Unit(dim_, k);
        VectorXd sum = bracket(bracket(ei, ej), ek) + bracket(bracket(ej, ek), ei) +
                       bracket(bracket(ek, ei), ej);
        double err = sum.cwiseAbs().maxCoeff();
        if (err > 1e-12 * scale * scale) {
          char buf[96];
          std::snprintf(buf, sizeof(buf), "cyclic bracket sum has norm %.3e", err);
          rep.violations.push_back({"jacobi", {i + 1, j + 1, k + 1}, buf});
        }
      }

  // Generation warning only: [g^[1], g^[k]] should span g^[k+1].
  for (int l = 1; l < step_; ++l) {
    int target = layer_dims_[l];
    if (target == 0) continue;
    if (rank() * layer_dims_[l - 1] == 0) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "[g^[1], g^[%d]] is empty but g^[%d] has dimension %d", l,
                    l + 1, target);
      rep.warnings.push_back(buf);
      continue;
    }
    MatrixXd span(target, rank() * layer_dims_[l - 1]);
    int col = 0;
    for (int a = 0; a < rank(); ++a)
      for (int b = 0; b < layer_dims_[l - 1]; ++b) {
        VectorXd w = bracket(VectorXd::Unit(dim_, layer_offset_[0] + a),
                             VectorXd::Unit(dim_, layer_offset_[l - 1] + b));
        span.col(col++) = w.segment(layer_offset_[l], target);
      }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(span);
    qr.setThreshold(1e-10);
    if (qr.rank() < target) {
      char buf[128];
      std::snprintf(buf, sizeof(buf),
                    "[g^[1], g^[%d]] spans only %d of %d dimensions of g^[%d]", l,
                    int(qr.rank()), target, l + 1);
      rep.warnings.push_back(buf);
    }
  }
  return rep;
}

void StratifiedAlgebra::ensure_valid() const {
  if (!valid_cache_.has_value()) valid_cache_ = validate().ok();
  if (!*valid_cache_)
    throw validation_error("algebra '" + name_ + "' fails validation: " + validate().to_string());
}

void StratifiedAlgebra::check_dim(const VectorXd& v, const char* who) const {
  if (v.size() != dim_)
    throw structural_error(std::string(who) + ": coordinate vector has wrong dimension");
}

bool StratifiedAlgebra::same_as(const StratifiedAlgebra& other) const {
  if (layer_dims_ != other.layer_dims_) return false;
  return table_ == other.table_;
}

// ---- built-ins ----

StratifiedAlgebra StratifiedAlgebra::heisenberg(int n) {
  if (n < 1) throw domain_error("heisenberg:n needs n >= 1");
  std::vector<BracketEntry> br;
  for (int i = 0; i < n; ++i) br.push_back({i, n + i, 2 * n, 1.0});
  return StratifiedAlgebra("heisenberg:" + std::to_string(n), {2 * n, 1}, br);
}

StratifiedAlgebra StratifiedAlgebra::filiform3() {
  return StratifiedAlgebra("filiform:3", {2, 1, 1}, {{0, 1, 2, 1.0}, {0, 2, 3, 1.0}});
}

StratifiedAlgebra StratifiedAlgebra::quaternionic_heisenberg(int n) {
  if (n < 1) throw domain_error("quaternionic-heisenberg:n needs n >= 1");
  // Base coordinates ordered (x_1..x_n, y_1..y_n, z_1..z_n, w_1..w_n); the
  // three fiber coordinates carry the symplectic triple rho_1, rho_2, rho_3.
  std::vector<BracketEntry> br;
  auto X = [&](int i) { return i; };
  auto Y = [&](int i) { return n + i; };
  auto Z = [&](int i) { return 2 * n + i; };
  auto W = [&](int i) { return 3 * n + i; };
  int f1 = 4 * n, f2 = 4 * n + 1, f3 = 4 * n + 2;
  for (int i = 0; i < n; ++i) {
    // rho_1 = dx^dy + dz^dw
    br.push_back({X(i), Y(i), f1, 1.0});
    br.push_back({Z(i), W(i), f1, 1.0});
    // rho_2 = dx^dz + dw^dy
    br.push_back({X(i), Z(i), f2, 1.0});
    br.push_back({W(i), Y(i), f2, 1.0});
    // rho_3 = J_1 J_2 = dw^dx + dz^dy
    br.push_back({W(i), X(i), f3, 1.0});
    br.push_back({Z(i), Y(i), f3, 1.0});
  }
  return StratifiedAlgebra("quaternionic-heisenberg:" + std::to_string(n), {4 * n, 3}, br);
}

StratifiedAlgebra StratifiedAlgebra::abelian(int n) {
  if (n < 1) throw domain_error("abelian:n needs n >= 1");
  return StratifiedAlgebra("abelian:" + std::to_string(n), {n}, {});
}

StratifiedAlgebra StratifiedAlgebra::by_name(const std::string& name) {
  auto colon = name.find(':');
  std::string head = name.substr(0, colon);
  int arg = 0;
  if (colon != std::string::npos) {
    try {
      arg = std::stoi(name.substr(colon + 1));
    } catch (...) {
      throw input_error("bad group name argument in '" + name + "'");
    }
  }
  if (head == "heisenberg") return heisenberg(arg);
  if (head == "filiform") {
    if (arg != 3) throw input_error("only filiform:3 is built in");
    return filiform3();
  }
  if (head == "quaternionic-heisenberg") return quaternionic_heisenberg(arg);
  if (head == "abelian") return abelian(arg);
  throw input_error("unknown group name '" + name + "'");
}

// ---- typed wrappers ----

static void require_same(const GroupElement& p, const GroupElement& q) {
  if (!p.algebra || !q.algebra) throw structural_error("element without algebra");
  if (p.algebra != q.algebra && !p.algebra->same_as(*q.algebra))
    throw structural_error("elements belong to different algebras");
}

GroupElement multiply(const GroupElement& p, const GroupElement& q) {
  require_same(p, q);
  return {p.algebra, p.algebra->multiply(p.coords, q.coords)};
}
GroupElement inverse(const GroupElement& p) { return {p.algebra, p.algebra->inverse(p.coords)}; }
GroupElement left_quotient(const GroupElement& p, const GroupElement& q) {
  require_same(p, q);
  return {p.algebra, p.algebra->left_quotient(p.coords, q.coords)};
}
GroupElement dilate(double lambda, const GroupElement& p) {
  return {p.algebra, p.algebra->dilate(lambda, p.coords)};
}
double quasi_metric(const GroupElement& p, const GroupElement& q) {
  require_same(p, q);
  return p.algebra->quasi_metric(p.coords, q.coords);
}

}  // namespace carnot
