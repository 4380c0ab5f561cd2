#include "carnot/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace carnot {

using nlohmann::json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write '" + path + "'");
  out << content;
}

namespace {

json parse_json_file(const std::string& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw input_error("malformed JSON in '" + path + "': " + e.what());
  }
}

StratifiedAlgebra group_from_json(const json& j, const std::string& where) {
  try {
    std::string name = j.value("name", "user-group");
    std::vector<int> layers = j.at("layers").get<std::vector<int>>();
    std::vector<BracketEntry> br;
    if (j.contains("brackets"))
      for (const auto& e : j.at("brackets"))
        br.push_back({e.at("i").get<int>() - 1, e.at("j").get<int>() - 1,
                      e.at("k").get<int>() - 1, e.at("c").get<double>()});
    return StratifiedAlgebra(name, layers, br);
  } catch (const json::exception& e) {
    throw input_error("bad group definition in " + where + ": " + e.what());
  }
}

}  // namespace

StratifiedAlgebra load_group(const std::string& name_or_path) {
  if (name_or_path.find(".json") == std::string::npos &&
      name_or_path.find('/') == std::string::npos)
    return StratifiedAlgebra::by_name(name_or_path);
  return group_from_json(parse_json_file(name_or_path), name_or_path);
}

CentralExtension load_extension(const std::string& path) {
  json j = parse_json_file(path);
  try {
    StratifiedAlgebra base = j.at("base").is_string()
                                 ? load_group(j.at("base").get<std::string>())
                                 : group_from_json(j.at("base"), path);
    std::vector<int> fiber_layers = j.at("fiber_layers").get<std::vector<int>>();
    std::vector<InvariantForm::CocycleEntry> cocycle;
    for (const auto& e : j.at("cocycle"))
      cocycle.push_back({e.at("i").get<int>() - 1, e.at("j").get<int>() - 1,
                         e.at("v").get<int>() - 1, e.at("c").get<double>()});
    return CentralExtension::build(base, fiber_layers, cocycle);
  } catch (const json::exception& e) {
    throw input_error("bad extension definition in " + path + ": " + e.what());
  }
}

SampledMap load_map_file(const std::string& path) {
  json j = parse_json_file(path);
  try {
    Box box;
    auto lo = j.at("domain_lo").get<std::vector<double>>();
    auto hi = j.at("domain_hi").get<std::vector<double>>();
    box.lo = Eigen::Map<VectorXd>(lo.data(), long(lo.size()));
    box.hi = Eigen::Map<VectorXd>(hi.data(), long(hi.size()));
    auto res = j.at("resolution").get<std::vector<int>>();
    int out_dim = j.at("target_dim").get<int>();
    auto vals = j.at("values").get<std::vector<double>>();
    SampledMap m(box, res, out_dim);
    if (long(vals.size()) != long(m.node_count()) * out_dim)
      throw input_error("map file '" + path + "': value count does not match grid");
    for (std::int64_t t = 0; t < m.node_count(); ++t)
      for (int c = 0; c < out_dim; ++c) m.node_value(t)[c] = vals[size_t(t) * out_dim + c];
    return m;
  } catch (const json::exception& e) {
    throw input_error("bad map file " + path + ": " + e.what());
  }
}

void save_map_file(const SampledMap& m, const std::string& path) {
  std::ostringstream os;
  os << "{\n  \"domain_lo\": [";
  for (int a = 0; a < m.in_dim(); ++a) os << (a ? ", " : "") << format_double(m.box().lo[a]);
  os << "],\n  \"domain_hi\": [";
  for (int a = 0; a < m.in_dim(); ++a) os << (a ? ", " : "") << format_double(m.box().hi[a]);
  os << "],\n  \"resolution\": [";
  for (size_t a = 0; a < m.resolution().size(); ++a)
    os << (a ? ", " : "") << m.resolution()[a];
  os << "],\n  \"target_dim\": " << m.out_dim() << ",\n  \"values\": [";
  for (std::int64_t t = 0; t < m.node_count(); ++t)
    for (int c = 0; c < m.out_dim(); ++c)
      os << (t + c ? ", " : "") << format_double(m.node_value(t)[c]);
  os << "]\n}\n";
  write_text_file(path, os.str());
}

HorizontalCurve load_curve_csv(const std::string& path, const StratifiedAlgebra& alg) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw input_error("empty curve file '" + path + "'");
  std::vector<VectorXd> rows;
  std::vector<double> times;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ss, tok, ',')) {
      try {
        vals.push_back(std::stod(tok));
      } catch (...) {
        throw input_error("curve file '" + path + "', line " + std::to_string(lineno) +
                          ": bad field '" + tok + "'");
      }
    }
    if (int(vals.size()) != alg.dim() + 1)
      throw input_error("curve file '" + path + "', line " + std::to_string(lineno) +
                        ": expected t plus " + std::to_string(alg.dim()) + " coordinates");
    times.push_back(vals[0]);
    rows.push_back(Eigen::Map<VectorXd>(vals.data() + 1, alg.dim()));
  }
  if (rows.size() < 2) throw input_error("curve file '" + path + "' has fewer than 2 nodes");
  HorizontalCurve c;
  c.algebra = &alg;
  c.times.resize(long(times.size()));
  c.points.resize(long(rows.size()), alg.dim());
  for (size_t i = 0; i < rows.size(); ++i) {
    c.times[long(i)] = times[i];
    c.points.row(long(i)) = rows[i].transpose();
  }
  return c;
}

void save_curve_csv(const HorizontalCurve& c, const std::string& path) {
  std::ostringstream os;
  os << "t";
  for (int a = 0; a < c.points.cols(); ++a) os << ",x" << (a + 1);
  os << "\n";
  for (int i = 0; i < c.nodes(); ++i) {
    os << format_double(c.times[i]);
    for (int a = 0; a < c.points.cols(); ++a) os << "," << format_double(c.points(i, a));
    os << "\n";
  }
  write_text_file(path, os.str());
}

}  // namespace carnot
