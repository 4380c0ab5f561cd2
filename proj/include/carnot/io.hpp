#pragma once

#include <string>
#include <vector>

#include "carnot/curves.hpp"
#include "carnot/extension.hpp"
#include "carnot/maps.hpp"

namespace carnot {

/// %.17g rendering used by every artifact writer (round-trip exact,
/// byte-stable on a fixed platform).
std::string format_double(double x);

/// Group definition: built-in name or JSON file
/// {"name": str, "layers": [int...], "brackets": [{"i","j","k","c"}...]}
/// with 1-based basis indices ordered layer by layer.
StratifiedAlgebra load_group(const std::string& name_or_path);

/// Extension definition JSON:
/// {"base": <group name or object>, "fiber_layers": [int...],
///  "cocycle": [{"i","j","v","c"}...]} (1-based indices).
CentralExtension load_extension(const std::string& path);

/// Map grid JSON: {"domain_lo": [...], "domain_hi": [...],
/// "resolution": [...], "target_dim": n, "values": [row-major node values]}.
SampledMap load_map_file(const std::string& path);
void save_map_file(const SampledMap& m, const std::string& path);

/// Curve CSV with header "t,x1,...,xn".
HorizontalCurve load_curve_csv(const std::string& path, const StratifiedAlgebra& alg);
void save_curve_csv(const HorizontalCurve& c, const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace carnot
