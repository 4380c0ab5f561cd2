#pragma once

#include <array>
#include <string_view>

namespace carnot {

/// Operation -> owning subcommand map. Every library operation is reachable
/// from exactly one subcommand; the unit tests audit this table against the
/// canonical operation list.
struct OpRoute {
  std::string_view op;
  std::string_view subcommand;
};

inline constexpr std::array<OpRoute, 36> kOpRoutes{{
    // core group arithmetic
    {"multiply", "mul"},
    {"inverse", "quotient"},
    {"left_quotient", "quotient"},
    {"dilate", "dilate"},
    {"quasi_metric", "seminorm"},
    {"left_invariant_frame", "frame"},
    {"contact_coframe", "coframe"},
    {"lie_differential_d0", "build-extension"},
    {"validate", "validate-algebra"},
    // extensions
    {"build_extension", "build-extension"},
    {"potential_form", "potential"},
    {"graded_hom_compose", "obstruction"},
    {"hom_obstruction", "obstruction"},
    {"top_wedge_coefficient", "quaternionic-check"},
    // curves and lifting
    {"endpoint", "endpoint"},
    {"line_integral", "lift-curve"},
    {"horizontal_lift", "lift-curve"},
    {"closed_loop_defect", "check-lift"},
    {"lift_map", "lift-map"},
    {"fiber_hom_extract", "fiber-hom"},
    {"pansu_quotient", "pansu"},
    {"contact_generator_check", "filiform-generator"},
    // symplectic machinery
    {"symplectic_defect", "pansu"},
    {"lambda_from_det", "pansu"},
    {"quaternionic_structure", "quaternionic-check"},
    {"quaternionic_rigidity_check", "quaternionic-check"},
    {"poincare_primitive", "moser-correct"},
    {"moser_correct", "moser-correct"},
    {"area_preserving_check", "area-check"},
    // Hoelder machinery
    {"group_convolve", "decay-experiment"},
    {"pullback_derivative", "decay-experiment"},
    {"decay_slope", "decay-experiment"},
    {"hoelder_seminorm", "seminorm"},
    {"weierstrass", "weierstrass"},
    {"young_integral", "young"},
    // driver
    {"run", "cli"},
}};

inline constexpr std::array<std::string_view, 23> kSubcommands{
    "validate-algebra", "mul",          "quotient",     "dilate",
    "frame",            "coframe",      "build-extension", "potential",
    "obstruction",      "endpoint",     "lift-curve",   "check-lift",
    "lift-map",         "fiber-hom",    "pansu",        "moser-correct",
    "area-check",       "quaternionic-check", "decay-experiment", "seminorm",
    "young",            "weierstrass",  "filiform-generator"};

}  // namespace carnot
