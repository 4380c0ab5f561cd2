#include "carnot/extension.hpp"

#include <cmath>
#include <cstdio>

namespace carnot {

CentralExtension CentralExtension::build(const StratifiedAlgebra& base,
                                         std::vector<int> fiber_layer_dims,
                                         const std::vector<InvariantForm::CocycleEntry>& cocycle) {
  base.ensure_valid();
  int fdim = 0;
  for (int d : fiber_layer_dims) {
    if (d < 0) throw input_error("negative fiber layer dimension");
    fdim += d;
  }
  if (fdim == 0) throw input_error("extension needs a nonempty fiber");

  // fiber layer of each fiber coordinate
  std::vector<int> fiber_layer_of(fdim);
  {
    int v = 0;
    for (int l = 0; l < int(fiber_layer_dims.size()); ++l)
      for (int j = 0; j < fiber_layer_dims[l]; ++j) fiber_layer_of[v++] = l + 1;
  }

  // Grading: rho(g^[i], g^[j]) must land in V^[i+j].
  for (const auto& e : cocycle) {
    if (e.v < 0 || e.v >= fdim) throw input_error("cocycle fiber index out of range");
    if (e.i < 0 || e.i >= base.dim() || e.j < 0 || e.j >= base.dim())
      throw input_error("cocycle basis index out of range");
    if (e.c == 0.0) continue;
    int want = base.weight(e.i) + base.weight(e.j);
    if (fiber_layer_of[e.v] != want) {
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "cocycle grading mismatch: rho(X_%d, X_%d) has weight %d but lands in V^[%d]",
                    e.i + 1, e.j + 1, want, fiber_layer_of[e.v]);
      throw validation_error(buf);
    }
  }

  // Cocycle condition d0 rho = 0 with witness triple.
  InvariantForm rho = InvariantForm::two_form_sparse(base, fdim, cocycle, 0);
  InvariantForm d0rho = lie_differential_d0(rho);
  double scale = 1.0 + rho.max_abs();
  for (int v = 0; v < fdim; ++v)
    for (int i = 0; i < base.dim(); ++i)
      for (int j = i + 1; j < base.dim(); ++j)
        for (int k = j + 1; k < base.dim(); ++k) {
          double val = d0rho.value3(v, i, j, k);
          if (std::abs(val) > 1e-12 * scale) {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "cocycle condition fails: d0 rho_%d(X_%d, X_%d, X_%d) = %.6e", v + 1,
                          i + 1, j + 1, k + 1, val);
            throw validation_error(buf);
          }
        }

  // Extended layers: base layers padded, plus the fiber layers.
  int ext_step = std::max<int>(base.step(), int(fiber_layer_dims.size()));
  std::vector<int> ext_layers(ext_step, 0);
  for (int l = 0; l < base.step(); ++l) ext_layers[l] = base.layer_dim(l + 1);
  while (int(fiber_layer_dims.size()) < ext_step) fiber_layer_dims.push_back(0);
  for (int l = 0; l < ext_step; ++l) ext_layers[l] += fiber_layer_dims[l];

  // Index maps: within each layer, base coordinates first, fiber after.
  CentralExtension ext;
  ext.base_holder_ = std::make_shared<StratifiedAlgebra>(base);
  ext.base_ = ext.base_holder_.get();
  ext.fiber_layer_dims_ = fiber_layer_dims;
  ext.base_index_.resize(base.dim());
  ext.fiber_index_.resize(fdim);
  {
    int pos = 0, bi = 0, fi = 0;
    for (int l = 0; l < ext_step; ++l) {
      int bd = (l < base.step()) ? base.layer_dim(l + 1) : 0;
      for (int j = 0; j < bd; ++j) ext.base_index_[bi++] = pos++;
      for (int j = 0; j < fiber_layer_dims[l]; ++j) ext.fiber_index_[fi++] = pos++;
    }
  }

  // Extended structure constants: base bracket plus rho into the fiber;
  // V is central.
  std::vector<BracketEntry> ext_br;
  for (const auto& [ij, ks] : base.table())
    for (const auto& [k, c] : ks)
      ext_br.push_back({ext.base_index_[ij.first], ext.base_index_[ij.second],
                        ext.base_index_[k], c});
  for (int v = 0; v < fdim; ++v) {
    const MatrixXd& t = rho.table2()[v];
    for (int i = 0; i < base.dim(); ++i)
      for (int j = i + 1; j < base.dim(); ++j)
        if (t(i, j) != 0.0)
          ext_br.push_back({ext.base_index_[i], ext.base_index_[j], ext.fiber_index_[v], t(i, j)});
  }
  ext.extended_ = StratifiedAlgebra(base.name() + "+V", ext_layers, ext_br);
  ext.extended_.ensure_valid();
  // rebind the cocycle to the extension's own copy of the base algebra so the
  // form stays valid when the caller's base goes out of scope
  ext.cocycle_ = InvariantForm::two_form(*ext.base_holder_, rho.table2(), 0);
  return ext;
}

bool CentralExtension::rank_preserving() const {
  return fiber_layer_dims_.empty() || fiber_layer_dims_[0] == 0;
}

VectorXd CentralExtension::embed_base(const VectorXd& h) const {
  VectorXd g = VectorXd::Zero(extended_.dim());
  for (int i = 0; i < base_->dim(); ++i) g[base_index_[i]] = h[i];
  return g;
}

VectorXd CentralExtension::embed_fiber(const VectorXd& k) const {
  VectorXd g = VectorXd::Zero(extended_.dim());
  for (int v = 0; v < fiber_dim(); ++v) g[fiber_index_[v]] = k[v];
  return g;
}

VectorXd CentralExtension::project_base(const VectorXd& g) const {
  VectorXd h(base_->dim());
  for (int i = 0; i < base_->dim(); ++i) h[i] = g[base_index_[i]];
  return h;
}

VectorXd CentralExtension::fiber_part(const VectorXd& g) const {
  VectorXd k(fiber_dim());
  for (int v = 0; v < fiber_dim(); ++v) k[v] = g[fiber_index_[v]];
  return k;
}

MatrixXd CentralExtension::potential_at(const VectorXd& p) const {
  if (!rank_preserving())
    throw structural_error("potential: fiber contains horizontal directions (rank drops)");
  MatrixXd C = extended_.contact_coframe(embed_base(p));
  MatrixXd alpha(fiber_dim(), base_->dim());
  for (int v = 0; v < fiber_dim(); ++v)
    for (int i = 0; i < base_->dim(); ++i)
      alpha(v, i) = -C(fiber_index_[v], base_index_[i]);
  return alpha;
}

std::shared_ptr<OneFormField> CentralExtension::potential_form() const {
  if (!rank_preserving())
    throw structural_error("potential: fiber contains horizontal directions (rank drops)");
  auto self = *this;  // value copy keeps the extension alive inside the field
  return std::make_shared<CallableOneForm>(
      fiber_dim(), base_->dim(),
      [self](const VectorXd& p) { return self.potential_at(p); });
}

// ---- graded homomorphisms ----

static void check_graded(const MatrixXd& M, const std::vector<int>& row_w,
                         const std::vector<int>& col_w, const char* who) {
  for (int r = 0; r < M.rows(); ++r)
    for (int c = 0; c < M.cols(); ++c)
      if (M(r, c) != 0.0 && row_w[r] != col_w[c])
        throw structural_error(std::string(who) + ": map is not graded at entry (" +
                               std::to_string(r + 1) + "," + std::to_string(c + 1) + ")");
}

static std::vector<int> base_weights(const CentralExtension& e) {
  std::vector<int> w(e.base().dim());
  for (int i = 0; i < e.base().dim(); ++i) w[i] = e.base().weight(i);
  return w;
}

static std::vector<int> fiber_weights(const CentralExtension& e) {
  std::vector<int> w(e.fiber_dim());
  for (int v = 0; v < e.fiber_dim(); ++v) w[v] = e.fiber_weight(v);
  return w;
}

MatrixXd graded_hom_compose(const GradedMapTriple& t, const CentralExtension& ext1,
                            const CentralExtension& ext2) {
  if (!t.mu) throw structural_error("graded_hom_compose: mu is absent");
  if (t.L.rows() != ext2.base().dim() || t.L.cols() != ext1.base().dim())
    throw structural_error("graded_hom_compose: L has wrong shape");
  if (t.phi.rows() != ext2.fiber_dim() || t.phi.cols() != ext1.fiber_dim())
    throw structural_error("graded_hom_compose: phi has wrong shape");
  if (t.mu->rows() != ext2.fiber_dim() || t.mu->cols() != ext1.base().dim())
    throw structural_error("graded_hom_compose: mu has wrong shape");
  check_graded(t.L, base_weights(ext2), base_weights(ext1), "L");
  check_graded(t.phi, fiber_weights(ext2), fiber_weights(ext1), "phi");
  check_graded(*t.mu, fiber_weights(ext2), base_weights(ext1), "mu");

  MatrixXd psi = MatrixXd::Zero(ext2.extended().dim(), ext1.extended().dim());
  for (int c = 0; c < ext1.base().dim(); ++c) {
    for (int r = 0; r < ext2.base().dim(); ++r)
      psi(ext2.base_index()[r], ext1.base_index()[c]) = t.L(r, c);
    for (int v = 0; v < ext2.fiber_dim(); ++v)
      psi(ext2.fiber_index()[v], ext1.base_index()[c]) = (*t.mu)(v, c);
  }
  for (int c = 0; c < ext1.fiber_dim(); ++c)
    for (int v = 0; v < ext2.fiber_dim(); ++v)
      psi(ext2.fiber_index()[v], ext1.fiber_index()[c]) = t.phi(v, c);
  return psi;
}

double hom_defect(const MatrixXd& psi, const StratifiedAlgebra& g1, const StratifiedAlgebra& g2) {
  double worst = 0.0;
  for (int i = 0; i < g1.dim(); ++i)
    for (int j = i + 1; j < g1.dim(); ++j) {
      VectorXd lhs = psi * g1.bracket(VectorXd::Unit(g1.dim(), i), VectorXd::Unit(g1.dim(), j));
      VectorXd rhs = g2.bracket(psi.col(i), psi.col(j));
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  return worst;
}

ObstructionResult hom_obstruction(const MatrixXd& L, const MatrixXd& phi,
                                  const CentralExtension& ext1, const CentralExtension& ext2) {
  const StratifiedAlgebra& h1 = ext1.base();
  const int n1 = h1.dim();
  check_graded(L, base_weights(ext2), base_weights(ext1), "L");
  check_graded(phi, fiber_weights(ext2), fiber_weights(ext1), "phi");

  // obstruction_v(i,j) = (phi o rho1)_v(i,j) - rho2_v(L e_i, L e_j)
  std::vector<MatrixXd> ob(ext2.fiber_dim(), MatrixXd::Zero(n1, n1));
  for (int v = 0; v < ext2.fiber_dim(); ++v) {
    const MatrixXd& R2 = ext2.cocycle().table2()[v];
    MatrixXd pulled = L.transpose() * R2 * L;
    MatrixXd first = MatrixXd::Zero(n1, n1);
    for (int w = 0; w < ext1.fiber_dim(); ++w)
      if (phi(v, w) != 0.0) first += phi(v, w) * ext1.cocycle().table2()[w];
    ob[v] = first - pulled;
  }
  InvariantForm ob_form = InvariantForm::two_form(h1, ob, 0);

  // Solve d0 mu = ob in least squares over graded mu: h1 -> V2.
  // d0 mu(X_i, X_j) = -mu([X_i, X_j]); the fiber components decouple.
  MatrixXd mu = MatrixXd::Zero(ext2.fiber_dim(), n1);
  double residual = 0.0;
  for (int v = 0; v < ext2.fiber_dim(); ++v) {
    int wv = ext2.fiber_weight(v);
    std::vector<int> cols;  // admissible mu entries for this component
    for (int k = 0; k < n1; ++k)
      if (h1.weight(k) == wv) cols.push_back(k);
    std::vector<std::pair<int, int>> rows;
    for (int i = 0; i < n1; ++i)
      for (int j = i + 1; j < n1; ++j) rows.emplace_back(i, j);
    MatrixXd A = MatrixXd::Zero(int(rows.size()), int(cols.size()));
    VectorXd b(int(rows.size()));
    for (size_t r = 0; r < rows.size(); ++r) {
      auto [i, j] = rows[r];
      for (size_t c = 0; c < cols.size(); ++c) A(int(r), int(c)) = -h1.structure_constant(i, j, cols[c]);
      b[int(r)] = ob[v](rows[r].first, rows[r].second);
    }
    VectorXd sol = cols.empty() ? VectorXd() : A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
    VectorXd res = cols.empty() ? b : VectorXd(b - A * sol);
    residual = std::max(residual, res.size() ? res.cwiseAbs().maxCoeff() : 0.0);
    for (size_t c = 0; c < cols.size(); ++c) mu(v, cols[c]) = sol[int(c)];
  }

  ObstructionResult out;
  out.obstruction = std::move(ob_form);
  out.residual = residual;
  if (residual < 1e-9) out.mu = mu;
  return out;
}

CentralExtension top_layer_extension(const StratifiedAlgebra& g) {
  g.ensure_valid();
  if (g.step() < 2) throw structural_error("top_layer_extension: group must have step >= 2");
  const int s = g.step();
  const int top_off = g.layer_offset(s);
  const int top_dim = g.layer_dim(s);
  if (top_dim == 0) throw structural_error("top_layer_extension: empty top layer");

  std::vector<int> base_layers(g.layer_dims().begin(), g.layer_dims().end() - 1);
  std::vector<BracketEntry> base_br;
  std::vector<InvariantForm::CocycleEntry> cocycle;
  for (const auto& [ij, ks] : g.table())
    for (const auto& [k, c] : ks) {
      if (k >= top_off)
        cocycle.push_back({ij.first, ij.second, k - top_off, c});
      else
        base_br.push_back({ij.first, ij.second, k, c});
    }
  StratifiedAlgebra base(g.name() + "/base", base_layers, base_br);
  std::vector<int> fiber_layers(s, 0);
  fiber_layers[s - 1] = top_dim;
  return CentralExtension::build(base, fiber_layers, cocycle);
}

// ---- Pfaffian ----

static double pfaffian_recursive(const MatrixXd& A) {
  const int n = int(A.rows());
  if (n == 0) return 1.0;
  if (n == 2) return A(0, 1);
  double sum = 0.0;
  for (int j = 1; j < n; ++j) {
    if (A(0, j) == 0.0) continue;
    MatrixXd sub(n - 2, n - 2);
    int r2 = 0;
    for (int r = 1; r < n; ++r) {
      if (r == j) continue;
      int c2 = 0;
      for (int c = 1; c < n; ++c) {
        if (c == j) continue;
        sub(r2, c2++) = A(r, c);
      }
      ++r2;
    }
    double sign = (j % 2 == 1) ? 1.0 : -1.0;
    sum += sign * A(0, j) * pfaffian_recursive(sub);
  }
  return sum;
}

// Householder reduction to skew tridiagonal form; Pf(T) is the product of the
// odd superdiagonal entries and each reflection flips the sign.
static double pfaffian_householder(MatrixXd A) {
  const int n = int(A.rows());
  double sign = 1.0;
  for (int k = 0; k < n - 2; ++k) {
    VectorXd x = A.col(k).segment(k + 1, n - k - 1);
    double alpha = x.norm();
    if (alpha < 1e-300) continue;
    VectorXd v = x;
    v[0] += (x[0] >= 0 ? alpha : -alpha);
    double vn = v.norm();
    if (vn < 1e-300) continue;
    v /= vn;
    // apply P = I - 2 v v^T to rows/cols k+1..n-1
    auto block = A.block(k + 1, 0, n - k - 1, n);
    block -= 2.0 * v * (v.transpose() * block);
    auto block2 = A.block(0, k + 1, n, n - k - 1);
    block2 -= 2.0 * (block2 * v) * v.transpose();
    sign = -sign;  // det(P) = -1
  }
  double pf = sign;
  for (int k = 0; k + 1 < n; k += 2) pf *= A(k, k + 1);
  return pf;
}

double top_wedge_coefficient(const MatrixXd& J) {
  if (J.rows() != J.cols()) throw structural_error("top_wedge_coefficient: matrix not square");
  if (J.rows() % 2 != 0) throw domain_error("top_wedge_coefficient: odd dimension");
  double scale = J.cwiseAbs().maxCoeff();
  if ((J + J.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + scale))
    throw structural_error("top_wedge_coefficient: matrix not antisymmetric");
  if (J.rows() <= 8) return pfaffian_recursive(J);
  return pfaffian_householder(J);
}

}  // namespace carnot
