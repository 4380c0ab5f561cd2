#include "carnot/forms.hpp"

#include <cmath>

namespace carnot {

InvariantForm InvariantForm::one_form(const StratifiedAlgebra& alg, MatrixXd values, int weight) {
  if (values.cols() != alg.dim()) throw structural_error("one_form: bad column count");
  InvariantForm f;
  f.alg_ = &alg;
  f.degree_ = 1;
  f.fiber_dim_ = int(values.rows());
  f.weight_ = weight;
  // weight homogeneity (weight 0 marks a mixed-weight form and skips the check)
  if (weight != 0)
    for (int v = 0; v < f.fiber_dim_; ++v)
      for (int k = 0; k < alg.dim(); ++k)
        if (values(v, k) != 0.0 && alg.weight(k) != weight)
          throw structural_error("one_form: entry off the declared weight");
  f.values1_ = std::move(values);
  return f;
}

InvariantForm InvariantForm::two_form(const StratifiedAlgebra& alg, std::vector<MatrixXd> values,
                                      int weight) {
  InvariantForm f;
  f.alg_ = &alg;
  f.degree_ = 2;
  f.fiber_dim_ = int(values.size());
  f.weight_ = weight;
  for (const auto& m : values) {
    if (m.rows() != alg.dim() || m.cols() != alg.dim())
      throw structural_error("two_form: bad table shape");
    if ((m + m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff()))
      throw structural_error("two_form: coefficient table is not antisymmetric");
    if (weight != 0)
      for (int i = 0; i < alg.dim(); ++i)
        for (int j = 0; j < alg.dim(); ++j)
          if (m(i, j) != 0.0 && alg.weight(i) + alg.weight(j) != weight)
            throw structural_error("two_form: entry off the declared weight");
  }
  f.values2_ = std::move(values);
  return f;
}

InvariantForm InvariantForm::two_form_sparse(const StratifiedAlgebra& alg, int fiber_dim,
                                             const std::vector<CocycleEntry>& entries,
                                             int weight) {
  std::vector<MatrixXd> tables(fiber_dim, MatrixXd::Zero(alg.dim(), alg.dim()));
  for (const auto& e : entries) {
    if (e.v < 0 || e.v >= fiber_dim) throw input_error("cocycle entry: fiber index out of range");
    if (e.i < 0 || e.i >= alg.dim() || e.j < 0 || e.j >= alg.dim() || e.i == e.j)
      throw input_error("cocycle entry: bad basis pair");
    tables[e.v](e.i, e.j) += e.c;
    tables[e.v](e.j, e.i) -= e.c;
  }
  return two_form(alg, std::move(tables), weight);
}

double InvariantForm::value3(int v, int i, int j, int k) const {
  if (degree_ != 3) throw structural_error("value3 on non-3-form");
  // canonical order with sign
  int a = i, b = j, c = k;
  double sign = 1.0;
  auto sw = [&](int& x, int& y) {
    std::swap(x, y);
    sign = -sign;
  };
  if (a > b) sw(a, b);
  if (b > c) sw(b, c);
  if (a > b) sw(a, b);
  if (a == b || b == c) return 0.0;
  const int n = alg_->dim();
  // index into flattened i<j<k list
  auto flat = [n](int x, int y, int z) {
    long idx = 0;
    for (int i2 = 0; i2 < x; ++i2) idx += long(n - 1 - i2) * (n - 2 - i2) / 2;
    for (int j2 = x + 1; j2 < y; ++j2) idx += n - 1 - j2;
    return idx + (z - y - 1);
  };
  return sign * values3_[v][flat(a, b, c)];
}

double InvariantForm::max_abs() const {
  double m = 0.0;
  if (degree_ == 1) m = values1_.size() ? values1_.cwiseAbs().maxCoeff() : 0.0;
  if (degree_ == 2)
    for (const auto& t : values2_) m = std::max(m, t.cwiseAbs().maxCoeff());
  if (degree_ == 3)
    for (const auto& t : values3_)
      for (double x : t) m = std::max(m, std::abs(x));
  return m;
}

MatrixXd InvariantForm::coefficients_at(const VectorXd& p) const {
  if (degree_ != 1) throw structural_error("coefficients_at: degree-1 form expected");
  return values1_ * alg_->contact_coframe(p);
}

MatrixXd InvariantForm::coefficient_matrix_at(const VectorXd& p, int v) const {
  if (degree_ != 2) throw structural_error("coefficient_matrix_at: degree-2 form expected");
  MatrixXd C = alg_->contact_coframe(p);
  return C.transpose() * values2_[v] * C;
}

InvariantForm lie_differential_d0(const InvariantForm& form) {
  const StratifiedAlgebra& alg = form.algebra();
  const int n = alg.dim();
  const int fd = form.fiber_dim();
  if (form.degree() == 1) {
    std::vector<MatrixXd> out(fd, MatrixXd::Zero(n, n));
    for (int v = 0; v < fd; ++v)
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          double s = 0.0;
          for (int k = 0; k < n; ++k) {
            double c = alg.structure_constant(i, j, k);
            if (c != 0.0) s -= c * form.table1()(v, k);
          }
          out[v](i, j) = s;
          out[v](j, i) = -s;
        }
    return InvariantForm::two_form(alg, std::move(out), form.weight());
  }
  if (form.degree() == 2) {
    auto rho = [&](int v, int a, int b) { return form.table2()[v](a, b); };
    InvariantForm f;
    f.alg_ = &alg;
    f.degree_ = 3;
    f.fiber_dim_ = fd;
    f.weight_ = form.weight();
    f.values3_.assign(fd, {});
    for (int v = 0; v < fd; ++v) {
      auto& flat = f.values3_[v];
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          for (int k = j + 1; k < n; ++k) {
            double s = 0.0;
            for (int m = 0; m < n; ++m) {
              double cij = alg.structure_constant(i, j, m);
              double cik = alg.structure_constant(i, k, m);
              double cjk = alg.structure_constant(j, k, m);
              if (cij != 0.0) s -= cij * rho(v, m, k);
              if (cik != 0.0) s += cik * rho(v, m, j);
              if (cjk != 0.0) s -= cjk * rho(v, m, i);
            }
            flat.push_back(s);
          }
    }
    return f;
  }
  throw structural_error("lie_differential_d0: unsupported degree");
}

InvariantOneForm::InvariantOneForm(InvariantForm form) : form_(std::move(form)) {
  if (form_.degree() != 1) throw structural_error("InvariantOneForm needs a degree-1 form");
}

}  // namespace carnot
