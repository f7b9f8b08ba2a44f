#include "ucp/config.hpp"

#include "ucp/expression.hpp"
#include "ucp/symbol_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ucp {

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"check", "certify", "rays", "corner", "carleman", "all"};
  return c;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double d = std::stod(v, &used);
    if (trim(v.substr(used)).empty() && std::isfinite(d)) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
}

long long to_integer(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (trim(v.substr(used)).empty()) return i;
  } catch (const std::exception&) {
  }
  throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
}

// Numbers separated by commas, semicolons or whitespace.
std::vector<double> number_list(const std::string& key, std::string v) {
  std::replace(v.begin(), v.end(), ',', ' ');
  std::replace(v.begin(), v.end(), ';', ' ');
  std::istringstream in(v);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(to_double(key, tok));
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section = "run";
  int lineno = 0;
  InlineGeometry geo;
  bool any_geometry = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "run" && section != "geometry" && section != "tolerances")
        throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(where + "empty key or value");

    if (section == "run") {
      if (key == "command") cfg.command = value;
      else if (key == "model") cfg.model = value;
      else if (key == "lambda") cfg.lambda = to_double(key, value);
      else if (key == "mu") cfg.mu = to_double(key, value);
      else if (key == "grid") cfg.grid = static_cast<int>(to_integer(key, value));
      else if (key == "samples") cfg.samples = static_cast<int>(to_integer(key, value));
      else if (key == "seed") {
        const long long s = to_integer(key, value);
        if (s < 0) throw ConfigError(where + "seed must be nonnegative");
        cfg.seed = static_cast<unsigned long long>(s);
      } else if (key == "out") cfg.out = value;
      else throw ConfigError(where + "unknown key '" + key + "' in [run]");
    } else if (section == "geometry") {
      any_geometry = true;
      if (key == "dim") geo.dim = static_cast<int>(to_integer(key, value));
      else if (key == "metric") geo.metric = value;
      else if (key == "phi_plus") geo.phi_plus = value;
      else if (key == "phi_minus") geo.phi_minus = value;
      else if (key == "box") geo.box = number_list(key, value);
      else if (key == "x0") geo.x0 = number_list(key, value);
      else if (key == "model") cfg.model = value;
      else throw ConfigError(where + "unknown key '" + key + "' in [geometry]");
    } else {
      const double d = to_double(key, value);
      if (key == "zero") cfg.tol.zero = d;
      else if (key == "chr") cfg.tol.chr = d;
      else if (key == "pos") cfg.tol.pos = d;
      else if (key == "id") cfg.tol.id = d;
      else throw ConfigError(where + "unknown tolerance '" + key + "'");
    }
  }
  if (any_geometry && (geo.dim != 0 || !geo.metric.empty() || !geo.phi_plus.empty()))
    cfg.geometry = geo;
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return parse_config(s.str());
}

void validate(const RunConfig& cfg) {
  if (cfg.command.empty()) throw ConfigError("no command given");
  const auto& c = commands();
  if (std::find(c.begin(), c.end(), cfg.command) == c.end())
    throw ConfigError("unknown command '" + cfg.command + "'");
  if (cfg.lambda && !(*cfg.lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (!(cfg.mu > 0.0)) throw ConfigError("mu must be positive");
  if (cfg.grid && *cfg.grid < 8) throw ConfigError("grid must be at least 8");
  if (cfg.samples && *cfg.samples < 1) throw ConfigError("samples must be positive");
  for (double t : {cfg.tol.zero, cfg.tol.chr, cfg.tol.pos, cfg.tol.id})
    if (!(t > 0.0)) throw ConfigError("every tolerance must be positive");
  if (cfg.out.empty()) throw ConfigError("output directory must be non-empty");
  if (cfg.model && cfg.geometry) throw ConfigError("give either a model name or an inline geometry");
  if (cfg.command != "corner" && !cfg.model && !cfg.geometry)
    throw ConfigError("command '" + cfg.command + "' needs --model or a [geometry] section");
  if (cfg.geometry) {
    const auto& g = *cfg.geometry;
    if (g.dim < 2) throw ConfigError("geometry: dim must be at least 2");
    if (g.metric.empty() || g.phi_plus.empty() || g.phi_minus.empty())
      throw ConfigError("geometry: metric, phi_plus and phi_minus are required");
    if (static_cast<int>(g.box.size()) != 2 * g.dim)
      throw ConfigError("geometry: box needs lo hi for every axis");
    if (!g.x0.empty() && static_cast<int>(g.x0.size()) != g.dim)
      throw ConfigError("geometry: x0 has the wrong length");
  }
}

namespace {

MetricField parse_metric(const std::string& text, int dim) {
  const std::string s = trim(text);
  const auto open = s.find('(');
  const std::string head = trim(s.substr(0, open));
  std::string body;
  if (open != std::string::npos) {
    if (s.back() != ')') throw ConfigError("metric: missing ')'");
    body = s.substr(open + 1, s.size() - open - 2);
  }
  Mat flat = Mat::Identity(dim, dim);
  flat(0, 0) = -1.0;
  if (head == "minkowski") return MetricField::constant(flat);
  if (head == "diag") {
    const auto v = number_list("metric", body);
    if (static_cast<int>(v.size()) != dim) throw ConfigError("metric: diag needs dim entries");
    Mat q = Mat::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) q(i, i) = v[i];
    return MetricField::constant(q);
  }
  if (head == "matrix") {
    const auto v = number_list("metric", body);
    if (static_cast<int>(v.size()) != dim * dim) throw ConfigError("metric: matrix needs dim^2 entries");
    Mat q(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) q(i, j) = v[i * dim + j];
    if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, q.cwiseAbs().maxCoeff()))
      throw ConfigError("metric: matrix is not symmetric");
    return MetricField::constant(q);
  }
  if (head == "conformal") {
    const auto v = number_list("metric", body);
    if (v.size() != 1) throw ConfigError("metric: conformal(amplitude) takes one number");
    if (dim < 3) throw ConfigError("metric: conformal needs dim >= 3");
    return conformal_model(dim - 1, v[0]).geometry.q;
  }
  throw ConfigError("metric: unknown form '" + head + "'");
}

}  // namespace

ModelSpec resolve_model(const RunConfig& cfg) {
  if (cfg.model) return model_by_name(*cfg.model);
  require(cfg.geometry.has_value(), "resolve_model: no geometry");
  const auto& g = *cfg.geometry;
  ModelSpec m;
  m.name = "inline";
  m.d = g.dim - 1;
  m.geometry.q = parse_metric(g.metric, g.dim);
  const Signature sig = signature(m.geometry.q(Vec::Zero(g.dim)));
  if (!sig.lorentzian()) throw ConfigError("metric: signature is not Lorentzian");
  m.geometry.phi_plus = Expression::parse(g.phi_plus, g.dim).field();
  m.geometry.phi_minus = Expression::parse(g.phi_minus, g.dim).field();
  Vec lo(g.dim), hi(g.dim);
  for (int i = 0; i < g.dim; ++i) {
    lo[i] = g.box[2 * i];
    hi[i] = g.box[2 * i + 1];
  }
  m.geometry.box = Box{lo, hi};
  if (!m.geometry.box.valid()) throw ConfigError("geometry: box has lo >= hi on some axis");
  if (!g.x0.empty()) m.x0 = Eigen::Map<const Vec>(g.x0.data(), g.dim);
  return m;
}

}  // namespace ucp
