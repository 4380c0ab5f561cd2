#include <cmath>

#include "carnot/algebra.hpp"

namespace carnot {

VectorXd StratifiedAlgebra::multiply(const VectorXd& p, const VectorXd& q) const {
  ensure_valid();
  check_dim(p, "multiply");
  check_dim(q, "multiply");
  if (step_ <= 3) return multiply_closed3(p, q);
  return bch(p, q);
}

// Product formula for step <= 3 in first-kind coordinates:
//   p * q = p + q + [p,q]/2 + [p - q, [p,q]]/12.
// Expanded in a graded basis this is exactly the (A, B, C) formula with the
// alpha/beta structure constants.
VectorXd StratifiedAlgebra::multiply_closed3(const VectorXd& p, const VectorXd& q) const {
  VectorXd w = bracket(p, q);
  VectorXd out = p + q + 0.5 * w;
  if (step_ >= 3) out += bracket(p - q, w) / 12.0;
  return out;
}

VectorXd StratifiedAlgebra::left_quotient(const VectorXd& p, const VectorXd& q) const {
  ensure_valid();
  check_dim(p, "left_quotient");
  check_dim(q, "left_quotient");
  if (step_ <= 3) return left_quotient_closed3(p, q);
  return bch(-p, q);
}

// Closed quotient: p^{-1} * q = q - p - [p,q]/2 + [p + q, [p,q]]/12.
VectorXd StratifiedAlgebra::left_quotient_closed3(const VectorXd& p, const VectorXd& q) const {
  VectorXd w = bracket(p, q);
  VectorXd out = q - p - 0.5 * w;
  if (step_ >= 3) out += bracket(p + q, w) / 12.0;
  return out;
}

VectorXd StratifiedAlgebra::dilate(double lambda, const VectorXd& p) const {
  check_dim(p, "dilate");
  if (!(lambda > 0.0)) throw domain_error("dilate: lambda must be positive");
  VectorXd out(dim_);
  for (int i = 0; i < dim_; ++i) out[i] = std::pow(lambda, weight_[i]) * p[i];
  return out;
}

double StratifiedAlgebra::quasi_metric(const VectorXd& p, const VectorXd& q) const {
  VectorXd d = left_quotient(q, p);  // q^{-1} p
  double sum = 0.0;
  for (int i = 0; i < dim_; ++i) sum += std::pow(std::abs(d[i]), 1.0 / weight_[i]);
  return sum;
}

// Left-invariant frame from the inverse left-trivialized differential of exp:
// X_j(p) = sum_k (B_k^+ / k!) ad_p^k(e_j), truncated by nilpotency.
// B^+ are Bernoulli numbers with B_1^+ = +1/2.
MatrixXd StratifiedAlgebra::left_invariant_frame(const VectorXd& p) const {
  ensure_valid();
  check_dim(p, "frame");
  static const double coeff[] = {
      1.0, 1.0 / 2, 1.0 / 12, 0.0, -1.0 / 720, 0.0, 1.0 / 30240, 0.0, -1.0 / 1209600, 0.0};
  if (step_ > 10) throw domain_error("frame: step > 10 not supported");
  MatrixXd F(dim_, dim_);
  for (int j = 0; j < dim_; ++j) {
    VectorXd term = VectorXd::Unit(dim_, j);
    VectorXd col = term;  // k = 0
    for (int k = 1; k < step_; ++k) {
      term = bracket(p, term);
      if (coeff[k] != 0.0) col += coeff[k] * term;
    }
    F.col(j) = col;
  }
  return F;
}

MatrixXd StratifiedAlgebra::contact_coframe(const VectorXd& p) const {
  MatrixXd F = left_invariant_frame(p);
  Eigen::PartialPivLU<MatrixXd> lu(F);
  double det = lu.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-12)
    throw structural_error("contact_coframe: frame matrix is singular");
  return lu.inverse();
}

// Dynkin series truncated at the group step: sum over tuples
// ((r_1,s_1),...,(r_n,s_n)), r_i + s_i >= 1, of
//   (-1)^(n-1) / (n * m * prod r_i! s_i!) * [X^(r_1) Y^(s_1) ... ],
// where m is the word length and the bracket monomial is right-nested.
namespace {

struct DynkinState {
  const StratifiedAlgebra* alg;
  const VectorXd* x;
  const VectorXd* y;
  int step;
  std::vector<int> word;  // 0 = X, 1 = Y
  double factorial_prod = 1.0;
  int blocks = 0;
  VectorXd acc;

  void flush() {
    const int m = int(word.size());
    if (m == 0) return;
    VectorXd val = (word[m - 1] == 0) ? *x : *y;
    for (int idx = m - 2; idx >= 0; --idx)
      val = alg->bracket(word[idx] == 0 ? *x : *y, val);
    double sign = (blocks % 2 == 1) ? 1.0 : -1.0;
    acc += val * (sign / (double(blocks) * double(m) * factorial_prod));
  }

  void recurse() {
    flush();
    if (int(word.size()) >= step) return;
    const int room = step - int(word.size());
    for (int r = 0; r <= room; ++r) {
      for (int s = (r == 0 ? 1 : 0); r + s <= room; ++s) {
        double fp = factorial_prod;
        for (int t = 2; t <= r; ++t) fp *= t;
        for (int t = 2; t <= s; ++t) fp *= t;
        size_t base = word.size();
        for (int t = 0; t < r; ++t) word.push_back(0);
        for (int t = 0; t < s; ++t) word.push_back(1);
        std::swap(fp, factorial_prod);
        ++blocks;
        recurse();
        --blocks;
        std::swap(fp, factorial_prod);
        word.resize(base);
      }
    }
  }
};

}  // namespace

VectorXd StratifiedAlgebra::bch(const VectorXd& x, const VectorXd& y) const {
  check_dim(x, "bch");
  check_dim(y, "bch");
  DynkinState st;
  st.alg = this;
  st.x = &x;
  st.y = &y;
  st.step = step_;
  st.acc = VectorXd::Zero(dim_);
  st.recurse();
  return st.acc;
}

}  // namespace carnot
