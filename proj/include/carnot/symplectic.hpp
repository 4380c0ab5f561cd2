#pragma once

#include "carnot/maps.hpp"

namespace carnot {

/// Standard symplectic matrix [0 I; -I 0] on R^{2n}.
MatrixXd standard_symplectic_matrix(int n);

/// Symplectic data on R^{2n} (standard) or R^{4n} (quaternionic triple with
/// J3 = J1 J2, J_i^2 = -I, J_i^T = -J_i).
struct SymplecticStructure {
  int n = 0;
  bool quaternionic = false;
  std::vector<MatrixXd> J;
};

SymplecticStructure standard_structure(int n);
/// Block matrices of rho_1 = sum dx^dy + dz^dw, rho_2 = sum dx^dz + dw^dy and
/// their product J3 = J1 J2 (coordinates ordered x_1..x_n, y.., z.., w..).
SymplecticStructure quaternionic_structure(int n);

/// max-abs entry of A^T J A - lambda J.
double symplectic_defect(const MatrixXd& A, const MatrixXd& J, double lambda);

/// lambda = det(A)^{1/n}; negative determinants allowed only for odd n.
double lambda_from_det(const MatrixXd& A, int n);

struct RigidityReport {
  double r1 = 0, r2 = 0, r3 = 0, orthogonality = 0;
  bool premise = false;  // r1, r2 < tau
  bool pass = false;     // premise implies r3 < c tau and |A A^T - I| < c tau
  double tau = 0, c = 0;
};

/// If A preserves J1 and J2 within tau then it must preserve J3 and be
/// orthogonal within c*tau; the report carries all four residuals.
RigidityReport quaternionic_rigidity_check(const MatrixXd& A, double tau = 1e-9);

/// Sampled differential forms on a box grid (shared layout with SampledMap).
struct SampledOneForm {
  Box box;
  std::vector<int> res;
  std::vector<VectorXd> values;  // per node: dim covector
  VectorXd eval(const VectorXd& x) const;
  std::int64_t nodes() const;
  VectorXd node_coords(std::int64_t flat) const;
};

struct SampledTwoForm {
  Box box;
  std::vector<int> res;
  std::vector<MatrixXd> values;  // per node: antisymmetric dim x dim
  MatrixXd eval(const VectorXd& x) const;
  std::int64_t nodes() const;
  VectorXd node_coords(std::int64_t flat) const;
};

struct PrimitiveReport {
  double d_input_residual = 0.0;  // closedness of the input
  double d_residual = 0.0;        // |d alpha - eta| on the interior grid
};

/// Radial homotopy primitive alpha(x) = int_0^1 t eta(c + t(x-c))(x-c, .) dt
/// about the chart center; requires the input closed within 1e-6.
SampledOneForm poincare_primitive(const SampledTwoForm& eta, PrimitiveReport* report = nullptr);

struct MoserReport {
  double eta_norm = 0.0;        // |f* omega - omega| before correction
  double corrected_norm = 0.0;  // same after correction
  double pf_min = 0.0;          // nondegeneracy guard over omega_t
  double primitive_residual = 0.0;
  bool reduced_100x = false;
};

struct MoserOptions {
  int flow_steps = 32;
  double pf_guard = 0.1;
  bool parallel = true;
};

/// Moser-flow correction g = f o Psi with Psi the time-1 flow of
/// iota_X omega_t = -alpha, omega_t = omega + t eta, eta = f* omega - omega.
SampledMap moser_correct(const SampledMap& f_eps, MoserReport* report,
                         const MoserOptions& opt = {});
SampledMap moser_correct_serial(const SampledMap& f_eps, MoserReport* report,
                                const MoserOptions& opt = {});

struct AreaCheckReport {
  double max_det_defect = 0.0;           // max |det Df - 1| over interior nodes
  std::vector<double> probe_ratios;      // m(f(D))/m(D) on concentric probe rectangles
  double max_ratio_defect = 0.0;
};

/// Central-difference Jacobian determinants plus measure comparison on probe
/// rectangles (maps of the plane).
AreaCheckReport area_preserving_check(const SampledMap& f);

}  // namespace carnot
