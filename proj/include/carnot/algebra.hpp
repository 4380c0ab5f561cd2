#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "carnot/common.hpp"

namespace carnot {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// One raw structure-constant entry [X_i, X_j] += c * X_k (0-based indices).
struct BracketEntry {
  int i, j, k;
  double c;
};

struct Violation {
  std::string kind;     // "antisymmetry", "grading", "jacobi"
  std::vector<int> indices;  // offending basis indices, 1-based for display
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<std::string> warnings;  // e.g. deficient generation of a layer
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

/// A stratified nilpotent Lie algebra in a fixed graded basis, together with
/// the group operations of its simply connected group in exponential
/// coordinates of the first kind.
///
/// Structure constants are stored sparsely, keyed by (i, j) with i < j; the
/// (j, i) entry is synthesized by sign so antisymmetry cannot be violated by
/// the canonical table. Raw input entries are kept so validate() can report
/// inconsistent antisymmetry data.
class StratifiedAlgebra {
 public:
  StratifiedAlgebra() = default;
  StratifiedAlgebra(std::string name, std::vector<int> layer_dims,
                    const std::vector<BracketEntry>& raw_brackets);

  // Built-ins addressable by name: "heisenberg:n", "filiform:3",
  // "quaternionic-heisenberg:n", "abelian:n".
  static StratifiedAlgebra heisenberg(int n);
  static StratifiedAlgebra filiform3();
  static StratifiedAlgebra quaternionic_heisenberg(int n);
  static StratifiedAlgebra abelian(int n);
  static StratifiedAlgebra by_name(const std::string& name);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  int step() const { return step_; }
  int rank() const { return layer_dims_.empty() ? 0 : layer_dims_[0]; }
  const std::vector<int>& layer_dims() const { return layer_dims_; }
  int weight(int idx) const { return weight_[idx]; }  // 1-based layer number
  int layer_offset(int layer) const { return layer_offset_[layer - 1]; }
  int layer_dim(int layer) const { return layer_dims_[layer - 1]; }
  /// Homogeneous dimension Q = sum_k k * dim(g^[k]).
  int homogeneous_dim() const;

  double structure_constant(int i, int j, int k) const;
  const std::map<std::pair<int, int>, std::vector<std::pair<int, double>>>& table() const {
    return table_;
  }

  /// [u, v] in coordinates.
  VectorXd bracket(const VectorXd& u, const VectorXd& v) const;

  ValidationReport validate() const;
  /// Throws validation_error when validate() reports violations.
  void ensure_valid() const;

  // ---- group operations (exponential coordinates of the first kind) ----

  /// p * q. Closed step<=3 product formula when applicable, Dynkin BCH
  /// truncation otherwise; both are exact by nilpotency.
  VectorXd multiply(const VectorXd& p, const VectorXd& q) const;
  VectorXd inverse(const VectorXd& p) const { return -p; }
  /// p^{-1} * q; for step <= 3 evaluated by the closed quotient formula.
  VectorXd left_quotient(const VectorXd& p, const VectorXd& q) const;
  VectorXd dilate(double lambda, const VectorXd& p) const;
  /// d_K(p, q) = sum over layers i and coordinates of |pi_i(q^{-1} p)|^{1/i}.
  double quasi_metric(const VectorXd& p, const VectorXd& q) const;

  /// Column j = the j-th left-invariant field at p in coordinates.
  MatrixXd left_invariant_frame(const VectorXd& p) const;
  /// Row j = the j-th left-invariant 1-form at p in the coordinate coframe;
  /// the inverse of the frame matrix.
  MatrixXd contact_coframe(const VectorXd& p) const;

  /// Dynkin BCH truncated at the group step (independent general-step path).
  VectorXd bch(const VectorXd& x, const VectorXd& y) const;

  bool same_as(const StratifiedAlgebra& other) const;

 private:
  VectorXd multiply_closed3(const VectorXd& p, const VectorXd& q) const;
  VectorXd left_quotient_closed3(const VectorXd& p, const VectorXd& q) const;
  void check_dim(const VectorXd& v, const char* who) const;

  std::string name_;
  std::vector<int> layer_dims_;
  std::vector<int> layer_offset_;
  std::vector<int> weight_;
  int dim_ = 0;
  int step_ = 0;
  std::map<std::pair<int, int>, std::vector<std::pair<int, double>>> table_;
  std::vector<BracketEntry> raw_;
  mutable std::optional<bool> valid_cache_;
};

/// Coordinates of a group element bound to its algebra.
struct GroupElement {
  const StratifiedAlgebra* algebra = nullptr;
  VectorXd coords;

  static GroupElement identity(const StratifiedAlgebra& a) {
    return {&a, VectorXd::Zero(a.dim())};
  }
};

GroupElement multiply(const GroupElement& p, const GroupElement& q);
GroupElement inverse(const GroupElement& p);
GroupElement left_quotient(const GroupElement& p, const GroupElement& q);
GroupElement dilate(double lambda, const GroupElement& p);
double quasi_metric(const GroupElement& p, const GroupElement& q);

}  // namespace carnot
