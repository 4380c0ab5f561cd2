#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "carnot/algebra.hpp"

namespace carnot {

/// V-valued left-invariant form, stored as constant coefficients on the
/// left-invariant coframe of `algebra`. Degree 3 appears only as the output
/// of the Lie algebra differential.
class InvariantForm {
 public:
  InvariantForm() = default;

  /// degree-1 form: values(v, k) = coefficient of theta^k in component v.
  static InvariantForm one_form(const StratifiedAlgebra& alg, MatrixXd values, int weight);
  /// degree-2 form from antisymmetric tables, one dim x dim matrix per fiber
  /// component.
  static InvariantForm two_form(const StratifiedAlgebra& alg, std::vector<MatrixXd> values,
                                int weight);
  /// degree-2 form from sparse entries rho(X_i, X_j) = c e_v (0-based, i < j).
  struct CocycleEntry {
    int i, j, v;
    double c;
  };
  static InvariantForm two_form_sparse(const StratifiedAlgebra& alg, int fiber_dim,
                                       const std::vector<CocycleEntry>& entries, int weight);

  int degree() const { return degree_; }
  int fiber_dim() const { return fiber_dim_; }
  int weight() const { return weight_; }
  const StratifiedAlgebra& algebra() const { return *alg_; }

  const MatrixXd& table1() const { return values1_; }
  const std::vector<MatrixXd>& table2() const { return values2_; }
  /// degree-3 component v evaluated on basis triple (i, j, k).
  double value3(int v, int i, int j, int k) const;

  double max_abs() const;

  /// Coefficients in the coordinate coframe at p (degree 1): fiber x dim.
  MatrixXd coefficients_at(const VectorXd& p) const;
  /// Coordinate-coframe matrix of component v at p (degree 2).
  MatrixXd coefficient_matrix_at(const VectorXd& p, int v) const;

 private:
  friend InvariantForm lie_differential_d0(const InvariantForm&);
  const StratifiedAlgebra* alg_ = nullptr;
  int degree_ = 0;
  int fiber_dim_ = 0;
  int weight_ = 0;
  MatrixXd values1_;
  std::vector<MatrixXd> values2_;
  std::vector<std::vector<double>> values3_;  // per fiber, flattened i<j<k
};

/// Alternating-sum Lie algebra differential; degree 1 -> 2 and 2 -> 3.
/// d0 mu (X, Y) = -mu([X, Y]);
/// d0 rho(X, Y, Z) = -rho([X,Y],Z) + rho([X,Z],Y) - rho([Y,Z],X).
InvariantForm lie_differential_d0(const InvariantForm& form);

/// A V-valued 1-form field given pointwise by coordinate-coframe
/// coefficients; the common currency of line integrals.
class OneFormField {
 public:
  virtual ~OneFormField() = default;
  virtual int fiber_dim() const = 0;
  virtual int space_dim() const = 0;
  /// fiber_dim x space_dim coefficient matrix on (dx_1, ..., dx_n) at p.
  virtual MatrixXd coefficients(const VectorXd& p) const = 0;
};

/// Left-invariant degree-1 form as a field.
class InvariantOneForm final : public OneFormField {
 public:
  explicit InvariantOneForm(InvariantForm form);
  int fiber_dim() const override { return form_.fiber_dim(); }
  int space_dim() const override { return form_.algebra().dim(); }
  MatrixXd coefficients(const VectorXd& p) const override { return form_.coefficients_at(p); }

 private:
  InvariantForm form_;
};

/// Arbitrary callable 1-form field (used for exact forms in tests and for
/// pulled-back potentials).
class CallableOneForm final : public OneFormField {
 public:
  CallableOneForm(int fiber, int space, std::function<MatrixXd(const VectorXd&)> fn)
      : fiber_(fiber), space_(space), fn_(std::move(fn)) {}
  int fiber_dim() const override { return fiber_; }
  int space_dim() const override { return space_; }
  MatrixXd coefficients(const VectorXd& p) const override { return fn_(p); }

 private:
  int fiber_, space_;
  std::function<MatrixXd(const VectorXd&)> fn_;
};

}  // namespace carnot
