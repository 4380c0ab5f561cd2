#pragma once

#include "carnot/curves.hpp"
#include "carnot/extension.hpp"
#include "carnot/maps.hpp"

namespace carnot {

/// Loop defect in the sense of the closed-curve lifting criterion: the
/// pullback circulation of the target potential minus the calibrated fiber
/// map applied to the source circulation,
///   defect = loop-int of f^* alpha_2  -  Phi_hat . loop-int of alpha_1,
/// where Phi_hat: V1 -> V2 is the pointwise candidate read off the Jacobian
/// at the loop basepoint (f^* rho_2 ~ Phi_hat o rho_1 in least squares).
/// On loops that close horizontally the alpha_1 term vanishes and this is the
/// plain circulation criterion. Zero defect over a spanning family certifies
/// liftability at the probe tolerance.
VectorXd closed_loop_defect(const MapFn& f, const HorizontalCurve& loop,
                            const CentralExtension& ext1, const CentralExtension& ext2,
                            MatrixXd* phi_hat_out = nullptr);

/// Pointwise fiber-map candidate from the Jacobian at p.
MatrixXd pointwise_fiber_candidate(const MapFn& f, const VectorXd& p,
                                   const CentralExtension& ext1, const CentralExtension& ext2);

struct CheckLiftOptions {
  std::uint64_t seed = 0;
  int anchors_per_axis = 4;
  std::vector<double> scales = {0.1, 0.3, 0.6};  // rectangle sizes relative to the chart span
  int random_loops = 100;
  int nodes_per_unit = 1024;
  double tol_per_length = 1e-6;
  bool parallel = true;
};

struct LoopRecord {
  double defect;   // max-abs component of the defect vector
  double length;
  double normalized;  // defect / length
};

struct CheckLiftReport {
  bool pass = false;
  double tol_per_length = 0.0;
  double max_normalized_defect = 0.0;
  int loops_checked = 0;
  std::vector<LoopRecord> records;
  HorizontalCurve witness;  // worst loop
  double witness_defect = 0.0;
  double witness_length = 0.0;
};

/// Probe-family certification: axis-aligned rectangles at the given scales
/// anchored on a coarse sub-grid plus seeded random polygonal loops, with
/// tolerance tol_per_length * length per loop.
CheckLiftReport check_lift(const MapFn& f, const CentralExtension& ext1,
                           const CentralExtension& ext2, const Box& base_chart,
                           const CheckLiftOptions& opt);

class NotLiftableError : public Error {
 public:
  NotLiftableError(const std::string& msg, CheckLiftReport rep)
      : Error(ErrorKind::NotLiftable, msg), report(std::move(rep)) {}
  CheckLiftReport report;
};

struct LiftOptions {
  CheckLiftOptions probe;
  int simpson_per_unit = 8;  // Simpson sub-intervals per unit of path length
  bool run_probe = true;
  bool parallel = true;
};

/// Value of the constructive lift at one point of the extended source chart:
/// connect the basepoint to the target node by the canonical horizontal path
/// (coordinate staircase, higher-layer targets by commutator rectangles) and
/// apply F(gamma(1)) = f(pi gamma(1)) . exp(path integral of f^* alpha_2).
/// Supported for step-2 extended source groups.
VectorXd lift_point(const MapFn& f, const CentralExtension& ext1, const CentralExtension& ext2,
                    const VectorXd& g0, const VectorXd& p0, const VectorXd& g,
                    const Box& base_chart, const LiftOptions& opt);

/// Grid lift over an extended-source chart; refuses (NotLiftableError with
/// the witness loop) when the defect probe fails.
SampledMap lift_map(const MapFn& f, const CentralExtension& ext1, const CentralExtension& ext2,
                    const VectorXd& g0, const VectorXd& p0, const Box& ext_chart,
                    const std::vector<int>& res, const LiftOptions& opt);
SampledMap lift_map_serial(const MapFn& f, const CentralExtension& ext1,
                           const CentralExtension& ext2, const VectorXd& g0, const VectorXd& p0,
                           const Box& ext_chart, const std::vector<int>& res,
                           const LiftOptions& opt);

struct FiberHomReport {
  MatrixXd Phi;               // V1 -> V2
  double max_deviation = 0.0;    // constancy across probe basepoints
  double linearity_residual = 0.0;
};

/// Phi(k) = F(g)^{-1} * F(g k) averaged over probe basepoints, with the
/// constancy and linearity residuals of the estimate.
FiberHomReport fiber_hom_extract(const MapFn& F, const CentralExtension& ext1,
                                 const CentralExtension& ext2, const Box& ext_chart,
                                 int probes_per_axis, double zeta);

/// delta_{1/lambda}(F(g)^{-1} F(g delta_lambda h)).
VectorXd pansu_quotient(const MapFn& F, const StratifiedAlgebra& G1, const StratifiedAlgebra& G2,
                        const VectorXd& g, const VectorXd& h, double lambda);

struct GeneratorCheckReport {
  double max_residual = 0.0;                 // max over grid of the Lie-derivative residual form
  double constraint_dx1 = 0.0, constraint_dx2 = 0.0, constraint_dx3 = 0.0, constraint_dx4 = 0.0;
  std::vector<std::string> violated;     // named violated constraints
  bool pass = false;
};

/// Contact-generator system on the step-3 filiform chart: with
/// p1 = d3 p4 and p3 = -d1 p4 built by central differences, checks
/// x1 p1 = d2 p4 and d4 p4 = 0 and reports the assembled residual 1-form.
GeneratorCheckReport contact_generator_check(const std::function<double(const VectorXd&)>& p4,
                                             const std::function<double(const VectorXd&)>& p2,
                                             const Box& chart, double h, double viol_tol = 1e-4);

}  // namespace carnot
