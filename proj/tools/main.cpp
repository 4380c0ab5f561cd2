// carnot-lift: batch driver exposing the library operations as subcommands
// with file I/O, deterministic seeds and JSON run summaries.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <memory>
#include <fstream>
#include <iostream>

#include "carnot/cli_audit.hpp"
#include "carnot/hoelder.hpp"
#include "carnot/io.hpp"
#include "carnot/lift.hpp"
#include "carnot/symplectic.hpp"

using namespace carnot;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNotLiftable = 3;
constexpr int kExitUnknownCommand = 64;
constexpr int kExitBadInput = 65;

struct Ctx {
  std::string group = "heisenberg:1";
  std::string extension;   // extension JSON path (optional)
  std::string extension2;  // target extension (defaults to the source one)
  std::string map = "identity:2";
  std::string curve;
  double eps = 0.05;
  std::string eps_grid;
  double beta = 1.0;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  int jobs = 0;
  std::string out = ".";

  std::string out_dir() const {
    if (const char* env = std::getenv("CARNOT_LIFT_OUT")) return env;
    return out;
  }
  std::string path(const std::string& file) const {
    std::filesystem::create_directories(out_dir());
    return (std::filesystem::path(out_dir()) / file).string();
  }
};

void add_common(CLI::App* cmd, Ctx& ctx) {
  cmd->add_option("--group", ctx.group, "group name or definition file");
  cmd->add_option("--extension", ctx.extension, "extension definition file");
  cmd->add_option("--extension2", ctx.extension2, "target extension definition file");
  cmd->add_option("--map", ctx.map, "map: builtin name or map grid file");
  cmd->add_option("--curve", ctx.curve, "curve/control CSV file");
  cmd->add_option("--eps", ctx.eps, "mollification scale");
  cmd->add_option("--eps-grid", ctx.eps_grid, "comma list of mollification scales");
  cmd->add_option("--beta", ctx.beta, "Hoelder exponent");
  cmd->add_option("--tol", ctx.tol, "tolerance");
  cmd->add_option("--seed", ctx.seed, "seed for all randomness (default 0)");
  cmd->add_option("--jobs", ctx.jobs, "worker count (0 = runtime default)");
  cmd->add_option("--out", ctx.out, "output directory (CARNOT_LIFT_OUT overrides)");
}

VectorXd parse_vector(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      v.push_back(std::stod(tok));
    } catch (...) {
      throw input_error("bad number '" + tok + "' in vector '" + s + "'");
    }
  }
  if (v.empty()) throw input_error("empty vector argument");
  return Eigen::Map<VectorXd>(v.data(), long(v.size()));
}

MatrixXd parse_matrix(const std::string& s) {
  std::vector<VectorXd> rows;
  std::stringstream ss(s);
  std::string row;
  while (std::getline(ss, row, ';')) rows.push_back(parse_vector(row));
  MatrixXd m(long(rows.size()), rows[0].size());
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) throw input_error("ragged matrix argument");
    m.row(long(r)) = rows[r].transpose();
  }
  return m;
}

std::vector<double> parse_list(const std::string& s) {
  VectorXd v = parse_vector(s);
  return {v.data(), v.data() + v.size()};
}

std::vector<int> parse_ints(const std::string& s) {
  auto v = parse_list(s);
  std::vector<int> out;
  for (double x : v) out.push_back(int(x));
  return out;
}

std::string vec_to_string(const VectorXd& v) {
  std::string s;
  for (int i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

json vec_to_json(const VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json mat_to_json(const MatrixXd& m) {
  json a = json::array();
  for (int r = 0; r < m.rows(); ++r) a.push_back(vec_to_json(m.row(r).transpose()));
  return a;
}

bool looks_like_file(const std::string& s) {
  return s.find(".json") != std::string::npos || s.find('/') != std::string::npos;
}

NamedMap resolve_map(const Ctx& ctx, SampledMap* sampled_out = nullptr) {
  if (looks_like_file(ctx.map)) {
    SampledMap m = load_map_file(ctx.map);
    if (sampled_out) *sampled_out = m;
    return {m.fn(), m.in_dim(), m.out_dim(), ctx.map};
  }
  return builtin_map(ctx.map);
}

CentralExtension resolve_extension(const Ctx& ctx, bool second = false) {
  const std::string& path = second ? ctx.extension2 : ctx.extension;
  if (!path.empty()) return load_extension(path);
  if (second && !ctx.extension.empty()) return load_extension(ctx.extension);
  return top_layer_extension(load_group(ctx.group));
}

// manifest block shared by every summary
json manifest(const Ctx& ctx, const std::string& command) {
  return json{{"command", command}, {"group", ctx.group},   {"extension", ctx.extension},
              {"map", ctx.map},     {"curve", ctx.curve},   {"eps", ctx.eps},
              {"eps_grid", ctx.eps_grid}, {"beta", ctx.beta}, {"tol", ctx.tol},
              {"seed", ctx.seed},   {"jobs", ctx.jobs},     {"out", ctx.out_dir()}};
}

void write_summary(const Ctx& ctx, const std::string& command, json body, bool ok) {
  body["manifest"] = manifest(ctx, command);
  body["ok"] = ok;
  write_text_file(ctx.path(command + "_summary.json"), body.dump(2) + "\n");
}

int run_cli(int argc, char** argv) {
  CLI::App app{"stratified group arithmetic, central extensions, lifts and decay experiments"};
  app.require_subcommand(1);
  Ctx ctx;

  std::string p_arg = "0,0,0", q_arg = "0,0,0";
  double lambda = 1.0;
  std::string L_arg, phi_arg, matrix_arg, h_arg;
  std::string box_lo, box_hi, res_arg = "33,33";
  std::string p4_name = "x3+x1x2";
  std::string f_arg = "weierstrass:6", g_arg = "weierstrass:6";
  std::string levels_arg = "4,14";
  std::string probes_arg;
  int n_arg = 1, N_arg = 6, budget = 20000, omega_index = 3, x_index = 2;
  double y_arg = 0.0, fd_alpha = 2.0 / 3.0;
  double start_fiber = 0.0;

  std::map<std::string, CLI::App*> cmds;
  for (auto name : kSubcommands) cmds[std::string(name)] = app.add_subcommand(std::string(name));
  for (auto& [name, cmd] : cmds) add_common(cmd, ctx);

  cmds["mul"]->add_option("--p", p_arg);
  cmds["mul"]->add_option("--q", q_arg);
  cmds["quotient"]->add_option("--p", p_arg);
  cmds["quotient"]->add_option("--q", q_arg);
  cmds["dilate"]->add_option("--p", p_arg);
  cmds["dilate"]->add_option("--lambda", lambda);
  cmds["frame"]->add_option("--p", p_arg);
  cmds["coframe"]->add_option("--p", p_arg);
  cmds["potential"]->add_option("--p", p_arg);
  cmds["obstruction"]->add_option("--L", L_arg);
  cmds["obstruction"]->add_option("--phi", phi_arg);
  cmds["lift-curve"]->add_option("--start-fiber", start_fiber);
  cmds["lift-map"]->add_option("--box-lo", box_lo);
  cmds["lift-map"]->add_option("--box-hi", box_hi);
  cmds["lift-map"]->add_option("--resolution", res_arg);
  cmds["fiber-hom"]->add_option("--box-lo", box_lo);
  cmds["fiber-hom"]->add_option("--box-hi", box_hi);
  cmds["endpoint"]->add_option("--p", p_arg);
  cmds["pansu"]->add_option("--p", p_arg);
  cmds["pansu"]->add_option("--q", q_arg);
  cmds["pansu"]->add_option("--lambda", lambda);
  cmds["moser-correct"]->add_option("--box-lo", box_lo);
  cmds["moser-correct"]->add_option("--box-hi", box_hi);
  cmds["moser-correct"]->add_option("--resolution", res_arg);
  cmds["area-check"]->add_option("--box-lo", box_lo);
  cmds["area-check"]->add_option("--box-hi", box_hi);
  cmds["area-check"]->add_option("--resolution", res_arg);
  cmds["quaternionic-check"]->add_option("--n", n_arg);
  cmds["quaternionic-check"]->add_option("--matrix", matrix_arg);
  cmds["decay-experiment"]->add_option("--omega-index", omega_index);
  cmds["decay-experiment"]->add_option("--x-index", x_index);
  cmds["decay-experiment"]->add_option("--probes", probes_arg);
  cmds["seminorm"]->add_option("--budget", budget);
  cmds["seminorm"]->add_option("--box-lo", box_lo);
  cmds["seminorm"]->add_option("--box-hi", box_hi);
  cmds["young"]->add_option("--f", f_arg);
  cmds["young"]->add_option("--g", g_arg);
  cmds["young"]->add_option("--alpha", fd_alpha);
  cmds["young"]->add_option("--levels", levels_arg);
  cmds["weierstrass"]->add_option("--y", y_arg);
  cmds["weierstrass"]->add_option("--N", N_arg);
  cmds["filiform-generator"]->add_option("--p4", p4_name);
  cmds["filiform-generator"]->add_option("--step", h_arg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (dynamic_cast<const CLI::ExtrasError*>(&e) ||
        e.get_name() == "RequiredError" || e.get_name() == "ExtrasError") {
      std::cerr << e.what() << "\n";
      return kExitUnknownCommand;
    }
    return app.exit(e);
  }
  set_jobs(ctx.jobs);

  auto active = app.get_subcommands().at(0);
  const std::string cmd = active->get_name();

  auto default_box = [&](int d, double lo, double hi) {
    Box b;
    b.lo = box_lo.empty() ? VectorXd::Constant(d, lo) : parse_vector(box_lo);
    b.hi = box_hi.empty() ? VectorXd::Constant(d, hi) : parse_vector(box_hi);
    return b;
  };

  if (cmd == "validate-algebra") {
    auto alg = load_group(ctx.group);
    auto rep = alg.validate();
    json viol = json::array();
    for (auto& v : rep.violations)
      viol.push_back({{"kind", v.kind}, {"indices", v.indices}, {"detail", v.detail}});
    write_summary(ctx, cmd,
                  {{"violations", viol}, {"warnings", rep.warnings}, {"dim", alg.dim()}},
                  rep.ok());
    std::cout << "validate-algebra " << ctx.group << ": "
              << (rep.ok() ? "ok" : "violations found") << " (" << rep.violations.size()
              << " violations, " << rep.warnings.size() << " warnings)\n";
    return rep.ok() ? kExitOk : kExitValidation;
  }

  if (cmd == "mul" || cmd == "quotient" || cmd == "dilate") {
    auto alg = load_group(ctx.group);
    VectorXd p = parse_vector(p_arg), out;
    if (cmd == "dilate") {
      out = alg.dilate(lambda, p);
    } else {
      VectorXd q = parse_vector(q_arg);
      out = (cmd == "mul") ? alg.multiply(p, q) : alg.multiply(alg.inverse(p), q);
      if (cmd == "quotient") {
        VectorXd closed = alg.left_quotient(p, q);
        if ((closed - out).cwiseAbs().maxCoeff() > 1e-10)
          throw structural_error("quotient cross-check failed");
        out = closed;
      }
    }
    write_summary(ctx, cmd, {{"result", vec_to_json(out)}}, true);
    std::cout << vec_to_string(out) << "\n";
    return kExitOk;
  }

  if (cmd == "frame" || cmd == "coframe") {
    auto alg = load_group(ctx.group);
    VectorXd p = parse_vector(p_arg);
    MatrixXd M = (cmd == "frame") ? alg.left_invariant_frame(p) : alg.contact_coframe(p);
    std::ostringstream csv;
    for (int r = 0; r < M.rows(); ++r) {
      for (int c = 0; c < M.cols(); ++c) csv << (c ? "," : "") << format_double(M(r, c));
      csv << "\n";
    }
    write_text_file(ctx.path(cmd + ".csv"), csv.str());
    write_summary(ctx, cmd, {{"matrix", mat_to_json(M)}}, true);
    std::cout << cmd << " at (" << vec_to_string(p) << ") written to " << ctx.path(cmd + ".csv")
              << "\n";
    return kExitOk;
  }

  if (cmd == "build-extension") {
    CentralExtension ext = resolve_extension(ctx);
    // d0 of the cocycle is re-checked here (it is the cocycle condition)
    auto d0 = lie_differential_d0(ext.cocycle());
    auto rep = ext.extended().validate();
    json layers = json::array();
    for (int d : ext.extended().layer_dims()) layers.push_back(d);
    write_summary(ctx, cmd,
                  {{"extended_dim", ext.extended().dim()},
                   {"extended_layers", layers},
                   {"fiber_dim", ext.fiber_dim()},
                   {"d0_cocycle_max", d0.max_abs()},
                   {"warnings", rep.warnings}},
                  rep.ok());
    std::cout << "extension built: dim " << ext.extended().dim() << ", fiber " << ext.fiber_dim()
              << ", cocycle d0 max " << format_double(d0.max_abs()) << "\n";
    return rep.ok() ? kExitOk : kExitValidation;
  }

  if (cmd == "potential") {
    CentralExtension ext = resolve_extension(ctx);
    VectorXd p = parse_vector(p_arg);
    MatrixXd a = ext.potential_at(p);
    write_summary(ctx, cmd, {{"alpha", mat_to_json(a)}}, true);
    std::cout << "alpha(" << vec_to_string(p) << ") rows: ";
    for (int v = 0; v < a.rows(); ++v)
      std::cout << (v ? " | " : "") << vec_to_string(a.row(v).transpose());
    std::cout << "\n";
    return kExitOk;
  }

  if (cmd == "obstruction") {
    CentralExtension ext1 = resolve_extension(ctx);
    CentralExtension ext2 = ctx.extension2.empty() ? ext1 : resolve_extension(ctx, true);
    MatrixXd L = L_arg.empty() ? MatrixXd::Identity(ext2.base().dim(), ext1.base().dim())
                               : parse_matrix(L_arg);
    MatrixXd phi = phi_arg.empty()
                       ? MatrixXd::Identity(ext2.fiber_dim(), ext1.fiber_dim())
                       : parse_matrix(phi_arg);
    auto res = hom_obstruction(L, phi, ext1, ext2);
    json body{{"obstruction_max", res.obstruction.max_abs()},
              {"mu_found", res.mu.has_value()},
              {"residual", res.residual}};
    if (res.mu) {
      body["mu"] = mat_to_json(*res.mu);
      GradedMapTriple t{L, phi, res.mu};
      MatrixXd psi = graded_hom_compose(t, ext1, ext2);
      body["psi"] = mat_to_json(psi);
      body["hom_defect"] = hom_defect(psi, ext1.extended(), ext2.extended());
    }
    write_summary(ctx, cmd, body, true);
    std::cout << "obstruction max " << format_double(res.obstruction.max_abs()) << ", mu "
              << (res.mu ? "found" : "absent") << " (residual "
              << format_double(res.residual) << ")\n";
    return kExitOk;
  }

  if (cmd == "endpoint") {
    auto alg = load_group(ctx.group);
    if (ctx.curve.empty()) throw input_error("endpoint needs --curve with a control CSV");
    // control CSV: header t,u1..ur
    std::ifstream in(ctx.curve);
    if (!in) throw input_error("cannot open '" + ctx.curve + "'");
    std::string line;
    std::getline(in, line);
    std::vector<double> times;
    std::vector<VectorXd> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      VectorXd v = parse_vector(line);
      if (v.size() != alg.rank() + 1)
        throw input_error("control file line " + std::to_string(lineno) + ": expected t plus " +
                          std::to_string(alg.rank()) + " values");
      times.push_back(v[0]);
      rows.push_back(v.tail(alg.rank()));
    }
    Control c;
    c.times = Eigen::Map<VectorXd>(times.data(), long(times.size()));
    c.values.resize(long(rows.size()), alg.rank());
    for (size_t i = 0; i < rows.size(); ++i) c.values.row(long(i)) = rows[i].transpose();
    VectorXd start = parse_vector(p_arg);
    if (start.size() != alg.dim()) start = VectorXd::Zero(alg.dim());
    auto curve = endpoint(alg, c, start);
    save_curve_csv(curve, ctx.path("trajectory.csv"));
    VectorXd end = curve.point(curve.nodes() - 1);
    write_summary(ctx, cmd, {{"endpoint", vec_to_json(end)}}, true);
    std::cout << vec_to_string(end) << "\n";
    return kExitOk;
  }

  if (cmd == "lift-curve") {
    CentralExtension ext = resolve_extension(ctx);
    if (ctx.curve.empty()) throw input_error("lift-curve needs --curve");
    auto base_curve = load_curve_csv(ctx.curve, ext.base());
    VectorXd start = ext.embed_base(base_curve.point(0));
    start += start_fiber * ext.embed_fiber(VectorXd::Ones(ext.fiber_dim()));
    auto lifted = horizontal_lift(base_curve, start, ext);
    VectorXd inc = line_integral(*ext.potential_form(), base_curve);
    save_curve_csv(lifted, ctx.path("lifted_curve.csv"));
    write_summary(ctx, cmd, {{"fiber_increment", vec_to_json(inc)}}, true);
    std::cout << "fiber increment " << vec_to_string(inc) << "\n";
    return kExitOk;
  }

  if (cmd == "check-lift" || cmd == "lift-map") {
    CentralExtension ext1 = resolve_extension(ctx);
    CentralExtension ext2 = ctx.extension2.empty() ? ext1 : resolve_extension(ctx, true);
    auto f = resolve_map(ctx);
    CheckLiftOptions popt;
    popt.seed = ctx.seed;
    popt.tol_per_length = ctx.tol;
    Box base_chart = default_box(ext1.base().dim(), -1.2, 1.2);
    if (cmd == "check-lift") {
      auto rep = check_lift(f.fn, ext1, ext2, base_chart, popt);
      save_curve_csv(rep.witness, ctx.path(rep.pass ? "worst_loop.csv" : "witness_loop.csv"));
      write_summary(ctx, cmd,
                    {{"max_normalized_defect", rep.max_normalized_defect},
                     {"tol_per_length", rep.tol_per_length},
                     {"loops_checked", rep.loops_checked},
                     {"witness_defect", rep.witness_defect},
                     {"witness_length", rep.witness_length},
                     {"pass", rep.pass}},
                    rep.pass);
      std::cout << "check-lift: defect " << format_double(rep.max_normalized_defect)
                << " per length over " << rep.loops_checked << " loops -> "
                << (rep.pass ? "liftable at tolerance" : "NOT liftable") << "\n";
      return rep.pass ? kExitOk : kExitNotLiftable;
    }
    // lift-map
    LiftOptions lopt;
    lopt.probe = popt;
    Box chart = default_box(ext1.extended().dim(), -1.0, 1.0);
    std::vector<int> res = parse_ints(res_arg);
    while (int(res.size()) < ext1.extended().dim()) res.push_back(res.back());
    VectorXd g0 = VectorXd::Zero(ext1.extended().dim());
    VectorXd p0 = ext2.embed_base(f.fn(ext1.project_base(g0)));
    try {
      auto F = lift_map(f.fn, ext1, ext2, g0, p0, chart, res, lopt);
      save_map_file(F, ctx.path("lifted_map.json"));
      write_summary(ctx, cmd, {{"nodes", F.node_count()}, {"artifact", "lifted_map.json"}}, true);
      std::cout << "lift-map: wrote " << F.node_count() << " nodes to "
                << ctx.path("lifted_map.json") << "\n";
      return kExitOk;
    } catch (const NotLiftableError& e) {
      save_curve_csv(e.report.witness, ctx.path("witness_loop.csv"));
      write_summary(ctx, cmd,
                    {{"max_normalized_defect", e.report.max_normalized_defect},
                     {"tol_per_length", e.report.tol_per_length},
                     {"witness", "witness_loop.csv"}},
                    false);
      std::cerr << "error: " << e.what() << "\n";
      return kExitNotLiftable;
    }
  }

  if (cmd == "fiber-hom") {
    CentralExtension ext1 = resolve_extension(ctx);
    CentralExtension ext2 = ctx.extension2.empty() ? ext1 : resolve_extension(ctx, true);
    auto F = resolve_map(ctx);
    Box chart = default_box(ext1.extended().dim(), -1.0, 1.0);
    auto rep = fiber_hom_extract(F.fn, ext1, ext2, chart, 3, 0.2);
    write_summary(ctx, cmd,
                  {{"Phi", mat_to_json(rep.Phi)},
                   {"max_deviation", rep.max_deviation},
                   {"linearity_residual", rep.linearity_residual}},
                  true);
    std::cout << "Phi deviation " << format_double(rep.max_deviation) << ", linearity "
              << format_double(rep.linearity_residual) << "\n";
    return kExitOk;
  }

  if (cmd == "pansu") {
    CentralExtension ext1 = resolve_extension(ctx);
    CentralExtension ext2 = ctx.extension2.empty() ? ext1 : resolve_extension(ctx, true);
    auto F = resolve_map(ctx);
    VectorXd g = parse_vector(p_arg), h = parse_vector(q_arg);
    VectorXd quot = pansu_quotient(F.fn, ext1.extended(), ext2.extended(), g, h, lambda);
    // horizontal block against the standard symplectic form when square
    json body{{"quotient", vec_to_json(quot)}, {"lambda", lambda}};
    const int r = ext1.extended().rank();
    if (r % 2 == 0 && ext1.extended().dim() == r + 1) {
      MatrixXd A(r, r);
      for (int c = 0; c < r; ++c) {
        VectorXd hb = VectorXd::Zero(ext1.extended().dim());
        hb[c] = 1.0;
        A.col(c) = pansu_quotient(F.fn, ext1.extended(), ext2.extended(), g, hb, lambda).head(r);
      }
      double lam_det = lambda_from_det(A, r / 2);
      body["horizontal_block"] = mat_to_json(A);
      body["symplectic_defect"] = symplectic_defect(A, standard_symplectic_matrix(r / 2), lam_det);
      body["lambda_from_det"] = lam_det;
    }
    write_summary(ctx, cmd, body, true);
    std::cout << "pansu quotient " << vec_to_string(quot) << "\n";
    return kExitOk;
  }

  if (cmd == "moser-correct") {
    SampledMap f;
    if (looks_like_file(ctx.map)) {
      f = load_map_file(ctx.map);
    } else {
      auto nm = builtin_map(ctx.map);
      Box box = default_box(nm.in_dim, -1.0, 1.0);
      auto res = parse_ints(res_arg);
      while (int(res.size()) < nm.in_dim) res.push_back(res.back());
      if (ctx.eps > 0.0) {
        auto dom = StratifiedAlgebra::abelian(nm.in_dim);
        auto kern = MollifierKernel::standard(dom, 17);
        f = group_convolve(nm.fn, dom, ctx.eps, kern, box, res, nm.out_dim);
      } else {
        f = SampledMap::sample(nm.fn, box, res, nm.out_dim);
      }
    }
    MoserReport rep;
    auto g = moser_correct(f, &rep);
    save_map_file(g, ctx.path("corrected_map.json"));
    write_summary(ctx, cmd,
                  {{"eta_norm", rep.eta_norm},
                   {"corrected_norm", rep.corrected_norm},
                   {"pf_min", rep.pf_min},
                   {"primitive_residual", rep.primitive_residual},
                   {"reduced_100x", rep.reduced_100x},
                   {"artifact", "corrected_map.json"}},
                  true);
    std::cout << "moser-correct: |f*w - w| " << format_double(rep.eta_norm) << " -> "
              << format_double(rep.corrected_norm) << "\n";
    return kExitOk;
  }

  if (cmd == "area-check") {
    SampledMap f;
    if (looks_like_file(ctx.map)) {
      f = load_map_file(ctx.map);
    } else {
      auto nm = builtin_map(ctx.map);
      Box box = default_box(2, -1.0, 1.0);
      auto res = parse_ints(res_arg);
      while (int(res.size()) < 2) res.push_back(res.back());
      f = SampledMap::sample(nm.fn, box, res, nm.out_dim);
    }
    auto rep = area_preserving_check(f);
    write_summary(ctx, cmd,
                  {{"max_det_defect", rep.max_det_defect},
                   {"probe_ratios", rep.probe_ratios},
                   {"max_ratio_defect", rep.max_ratio_defect}},
                  true);
    std::cout << "area-check: max |det - 1| " << format_double(rep.max_det_defect) << "\n";
    return kExitOk;
  }

  if (cmd == "quaternionic-check") {
    auto S = quaternionic_structure(n_arg);
    std::ostringstream csv;
    for (int k = 0; k < 3; ++k) {
      csv.str("");
      for (int r = 0; r < S.J[k].rows(); ++r) {
        for (int c = 0; c < S.J[k].cols(); ++c)
          csv << (c ? "," : "") << format_double(S.J[k](r, c));
        csv << "\n";
      }
      write_text_file(ctx.path("J" + std::to_string(k + 1) + ".csv"), csv.str());
    }
    json body{{"n", n_arg},
              {"J3_equals_J1J2", (S.J[0] * S.J[1] - S.J[2]).cwiseAbs().maxCoeff()},
              {"pfaffians",
               {top_wedge_coefficient(S.J[0]), top_wedge_coefficient(S.J[1]),
                top_wedge_coefficient(S.J[2])}}};
    if (!matrix_arg.empty()) {
      auto rep = quaternionic_rigidity_check(parse_matrix(matrix_arg), ctx.tol > 0 ? ctx.tol : 1e-9);
      body["rigidity"] = {{"r1", rep.r1},
                          {"r2", rep.r2},
                          {"r3", rep.r3},
                          {"orthogonality", rep.orthogonality},
                          {"premise", rep.premise},
                          {"pass", rep.pass}};
      write_summary(ctx, cmd, body, rep.pass);
      std::cout << "quaternionic-check: residuals " << format_double(rep.r1) << " "
                << format_double(rep.r2) << " " << format_double(rep.r3) << ", |AA^T - I| "
                << format_double(rep.orthogonality) << "\n";
      return rep.pass ? kExitOk : kExitValidation;
    }
    write_summary(ctx, cmd, body, true);
    std::cout << "quaternionic-check: n=" << n_arg << " structures written, J3 = J1 J2 holds\n";
    return kExitOk;
  }

  if (cmd == "decay-experiment") {
    auto domain = load_group(ctx.group);
    auto target = domain;  // experiments here share domain and target charts
    auto f = resolve_map(ctx);
    auto kern = MollifierKernel::standard(domain, 13);
    std::vector<double> eps = ctx.eps_grid.empty()
                                  ? std::vector<double>{0.0625, 0.03125, 0.015625, 0.0078125}
                                  : parse_list(ctx.eps_grid);
    std::vector<VectorXd> probes;
    if (probes_arg.empty()) {
      const int n = 41;
      for (int i = 0; i < n; ++i) {
        VectorXd p = VectorXd::Zero(domain.dim());
        p[0] = 0.35;
        p[1] = -1.0 + 2.0 * i / (n - 1);
        probes.push_back(p);
      }
    } else {
      std::stringstream ss(probes_arg);
      std::string tok;
      while (std::getline(ss, tok, ';')) probes.push_back(parse_vector(tok));
    }
    DecayOptions dopt;
    dopt.beta = ctx.beta;
    auto res =
        decay_slope(f.fn, domain, target, omega_index - 1, x_index - 1, eps, probes, kern, dopt);
    {  // grid sample of the mollified map at the median scale
      double emed = eps[eps.size() / 2];
      Box mbox;
      mbox.lo = VectorXd::Constant(domain.dim(), -1.0);
      mbox.hi = VectorXd::Constant(domain.dim(), 1.0);
      std::vector<int> mres(domain.dim(), 9);
      auto feps = group_convolve(f.fn, domain, emed, kern, mbox, mres, f.out_dim);
      save_map_file(feps, ctx.path("mollified_map.json"));
    }
    std::ostringstream csv;
    csv << "epsilon,sup_value,omega_index,X_index\n";
    for (auto& pt : res.points)
      csv << format_double(pt.eps) << "," << format_double(pt.sup) << "," << omega_index << ","
          << x_index << "\n";
    write_text_file(ctx.path("decay.csv"), csv.str());
    write_summary(ctx, cmd,
                  {{"slope", res.slope},
                   {"fit_residual", res.fit_residual},
                   {"beta", ctx.beta},
                   {"at_noise_floor", res.at_noise_floor},
                   {"certifies_liftability_regime", res.certifies},
                   {"in_weight_regime", res.in_weight_regime},
                   {"kernel", res.kernel_info}},
                  true);
    std::cout << "decay-experiment: slope " << format_double(res.slope)
              << (res.at_noise_floor ? " (at noise floor)" : "") << "\n";
    return kExitOk;
  }

  if (cmd == "seminorm") {
    auto domain = load_group(ctx.group);
    auto f = resolve_map(ctx);
    auto target = StratifiedAlgebra::abelian(f.out_dim);
    if (f.out_dim == domain.dim()) target = domain;
    Box chart = default_box(domain.dim(), -1.0, 1.0);
    double est = hoelder_seminorm(f.fn, domain, target, chart, ctx.beta, budget, ctx.seed);
    write_summary(ctx, cmd, {{"seminorm_lower_bound", est}, {"pair_budget", budget}}, true);
    std::cout << "seminorm lower bound " << format_double(est) << " (beta "
              << format_double(ctx.beta) << ")\n";
    return kExitOk;
  }

  if (cmd == "young") {
    auto path_fn = [&](const std::string& spec) -> std::function<double(double)> {
      if (spec.rfind("weierstrass:", 0) == 0) {
        int N = std::stoi(spec.substr(12));
        return [N](double t) { return weierstrass(t, N); };
      }
      if (spec == "linear") return [](double t) { return t; };
      if (spec.rfind("constant:", 0) == 0) {
        double c = std::stod(spec.substr(9));
        return [c](double) { return c; };
      }
      if (looks_like_file(spec)) {
        // sampled scalar path: curve CSV "t,x1", piecewise linear in t
        auto r1 = std::make_shared<StratifiedAlgebra>(StratifiedAlgebra::abelian(1));
        auto curve = std::make_shared<HorizontalCurve>(load_curve_csv(spec, *r1));
        return [r1, curve](double t) {
          const auto& tv = curve->times;
          const int n = int(tv.size());
          if (t <= tv[0]) return curve->points(0, 0);
          if (t >= tv[n - 1]) return curve->points(n - 1, 0);
          int lo = 0, hi = n - 1;
          while (hi - lo > 1) {
            int mid = (lo + hi) / 2;
            (tv[mid] <= t ? lo : hi) = mid;
          }
          double w = (t - tv[lo]) / (tv[lo + 1] - tv[lo]);
          return (1.0 - w) * curve->points(lo, 0) + w * curve->points(lo + 1, 0);
        };
      }
      throw input_error("unknown path spec '" + spec + "'");
    };
    auto levels = parse_ints(levels_arg);
    if (levels.size() != 2) throw input_error("--levels wants lo,hi");
    auto res =
        young_integral(path_fn(f_arg), path_fn(g_arg), 0.0, 1.0, fd_alpha, ctx.beta, levels[0],
                       levels[1]);
    std::ostringstream csv;
    csv << "level,value,delta\n";
    for (size_t i = 0; i < res.levels.size(); ++i)
      csv << res.levels[i] << "," << format_double(res.level_values[i]) << ","
          << (i ? format_double(res.deltas[i - 1]) : "") << "\n";
    write_text_file(ctx.path("young_trace.csv"), csv.str());
    write_summary(ctx, cmd, {{"value", res.value}, {"levels", res.levels}}, true);
    std::cout << "young integral " << format_double(res.value) << "\n";
    return kExitOk;
  }

  if (cmd == "weierstrass") {
    double v = weierstrass(y_arg, N_arg);
    std::ostringstream csv;
    csv << "y,g\n";
    for (int i = 0; i <= 256; ++i) {
      double y = -1.0 + 2.0 * i / 256.0;
      csv << format_double(y) << "," << format_double(weierstrass(y, N_arg)) << "\n";
    }
    write_text_file(ctx.path("weierstrass.csv"), csv.str());
    write_summary(ctx, cmd,
                  {{"value", v}, {"N", N_arg}, {"tail_bound", weierstrass_tail_bound(N_arg)}},
                  true);
    std::cout << format_double(v) << "\n";
    return kExitOk;
  }

  if (cmd == "filiform-generator") {
    auto p4 = [&](const std::string& name) -> std::function<double(const VectorXd&)> {
      if (name == "x3+x1x2") return [](const VectorXd& x) { return x[2] + x[0] * x[1]; };
      if (name == "x3-x1x2") return [](const VectorXd& x) { return x[2] - x[0] * x[1]; };
      if (name == "x4") return [](const VectorXd& x) { return x[3]; };
      if (name.rfind("constant:", 0) == 0) {
        double c = std::stod(name.substr(9));
        return [c](const VectorXd&) { return c; };
      }
      throw input_error("unknown p4 field '" + name + "'");
    };
    Box chart;
    chart.lo = VectorXd::Constant(4, -0.1);
    chart.hi = VectorXd::Constant(4, 0.1);
    double h = h_arg.empty() ? 1e-2 : std::stod(h_arg);
    auto rep = contact_generator_check(p4(p4_name), [](const VectorXd&) { return 0.0; }, chart, h,
                                       ctx.tol > 0 ? ctx.tol : 1e-4);
    write_summary(ctx, cmd,
                  {{"max_residual", rep.max_residual},
                   {"violated", rep.violated},
                   {"pass", rep.pass},
                   {"h", h}},
                  rep.pass);
    std::cout << "filiform-generator: residual " << format_double(rep.max_residual)
              << (rep.pass ? " (generator system satisfied)" : " (violated: ") ;
    if (!rep.pass) {
      for (size_t i = 0; i < rep.violated.size(); ++i)
        std::cout << (i ? "; " : "") << rep.violated[i];
      std::cout << ")";
    }
    std::cout << "\n";
    return rep.pass ? kExitOk : kExitValidation;
  }

  std::cerr << "unknown subcommand\n";
  return kExitUnknownCommand;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const NotLiftableError& e) {
    // witness loop written next to the other artifacts
    try {
      Ctx ctx;
      save_curve_csv(e.report.witness, ctx.path("witness_loop.csv"));
    } catch (...) {
    }
    std::cerr << "error: " << e.what() << "\n";
    return kExitNotLiftable;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::Input:
        return kExitBadInput;
      case ErrorKind::Validation:
        return kExitValidation;
      case ErrorKind::NotLiftable:
        return kExitNotLiftable;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
