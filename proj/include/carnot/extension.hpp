#pragma once

#include <memory>
#include <optional>

#include "carnot/forms.hpp"

namespace carnot {

/// Central extension g = h (+) V of a stratified algebra by a graded
/// 2-cocycle, with the derived extended algebra and coordinate embeddings.
class CentralExtension {
 public:
  /// fiber_layer_dims[l] = dim V^[l+1]; may be longer than the base step.
  /// Throws on cocycle-condition or grading failures (with witnesses).
  static CentralExtension build(const StratifiedAlgebra& base, std::vector<int> fiber_layer_dims,
                                const std::vector<InvariantForm::CocycleEntry>& cocycle);

  const StratifiedAlgebra& base() const { return *base_; }
  const StratifiedAlgebra& extended() const { return extended_; }
  const InvariantForm& cocycle() const { return cocycle_; }
  int fiber_dim() const { return int(fiber_index_.size()); }
  int fiber_weight(int v) const { return extended_.weight(fiber_index_[v]); }
  const std::vector<int>& base_index() const { return base_index_; }
  const std::vector<int>& fiber_index() const { return fiber_index_; }
  bool rank_preserving() const;  // rank(G) = rank(H): no horizontal fiber part

  // coordinate maps along iota / pi
  VectorXd embed_base(const VectorXd& h) const;         // h -> (h, 0)
  VectorXd embed_fiber(const VectorXd& k) const;        // k -> (0, k)
  VectorXd project_base(const VectorXd& g) const;       // pi
  VectorXd fiber_part(const VectorXd& g) const;

  /// Potential alpha with d(alpha) = rho, read off the extended contact
  /// coframe: the fiber coframe row equals dC - alpha in base coordinates.
  /// Requires rank_preserving().
  /// Returns coefficients (fiber_dim x base_dim) in the base coordinate
  /// coframe at base point p.
  MatrixXd potential_at(const VectorXd& p) const;
  /// The same potential as a 1-form field on the base chart.
  std::shared_ptr<OneFormField> potential_form() const;

 private:
  std::shared_ptr<const StratifiedAlgebra> base_holder_;  // keeps by-value bases alive
  const StratifiedAlgebra* base_ = nullptr;
  StratifiedAlgebra extended_;
  std::vector<int> fiber_layer_dims_;
  std::vector<int> base_index_, fiber_index_;
  InvariantForm cocycle_;
};

/// Graded map triple (L, phi, mu) between extension sequences.
struct GradedMapTriple {
  MatrixXd L;                   // h1 -> h2
  MatrixXd phi;                 // V1 -> V2
  std::optional<MatrixXd> mu;   // h1 -> V2
};

/// psi(X + Y) = L(X) + (mu(X) + phi(Y)) as a g1 -> g2 matrix.
/// Throws when a map is not graded or mu is absent.
MatrixXd graded_hom_compose(const GradedMapTriple& t, const CentralExtension& ext1,
                            const CentralExtension& ext2);

/// Max bracket-preservation residual of a linear map psi: g1 -> g2 over all
/// basis pairs.
double hom_defect(const MatrixXd& psi, const StratifiedAlgebra& g1, const StratifiedAlgebra& g2);

struct ObstructionResult {
  InvariantForm obstruction;        // V2-valued 2-form on h1: phi o rho1 - L* rho2
  std::optional<MatrixXd> mu;       // least-squares solution of d0 mu = obstruction
  double residual = 0.0;            // attained residual of the linear solve
};

/// Extension-map obstruction with a least-squares mu-solver over graded
/// linear maps h1 -> V2; mu is returned when the residual is below 1e-9.
ObstructionResult hom_obstruction(const MatrixXd& L, const MatrixXd& phi,
                                  const CentralExtension& ext1, const CentralExtension& ext2);

/// Pfaffian of an antisymmetric 2m x 2m matrix: the coefficient of
/// omega^m / m! on the volume form. Recursive expansion for 2m <= 8,
/// skew-tridiagonalization above.
double top_wedge_coefficient(const MatrixXd& J);

/// Canonical presentation of a step >= 2 group as the central extension of
/// its first s-1 layers by the top layer; the cocycle collects the brackets
/// landing there.
CentralExtension top_layer_extension(const StratifiedAlgebra& g);

}  // namespace carnot
