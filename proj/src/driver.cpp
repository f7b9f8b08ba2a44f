#include "ucp/driver.hpp"

#include "ucp/carleman_lab.hpp"
#include "ucp/certifier.hpp"
#include "ucp/corner_lab.hpp"
#include "ucp/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>

namespace ucp {

namespace {

struct Stage {
  bool pass = false;
  Json report;
};

Json witness_json(const std::optional<Point>& w) { return w ? to_json(*w) : Json(nullptr); }

std::string axis_names(int n, const std::string& prefix) {
  std::string s;
  for (int i = 0; i < n; ++i) s += (i ? "," : "") + prefix + std::to_string(i + 1);
  return s;
}

std::vector<std::string> split_header(const std::string& s) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const auto c = s.find(',', start);
    out.push_back(s.substr(start, c - start));
    if (c == std::string::npos) return out;
    start = c + 1;
  }
}

//--------------------------------------------------------------------------------------------------

Stage stage_check(const ModelSpec& model, RunResult& res) {
  Stage st;
  const HypothesisReport rep = check_assumptions(model.geometry);
  Json checks = Json::object();
  for (const auto& [name, r] : rep.checks) {
    Json j = {{"pass", r.pass},
              {"margin", number(r.margin)},
              {"n_points", r.n_points},
              {"detail", r.detail},
              {"witness", witness_json(r.witness)}};
    if (!r.values.empty()) {
      j["min_value"] = number(*std::min_element(r.values.begin(), r.values.end()));
      j["max_value"] = number(*std::max_element(r.values.begin(), r.values.end()));
    }
    checks[name] = j;
  }
  st.pass = rep.all_pass();
  st.report = {{"checks", checks}, {"failed", rep.failed()}, {"pass", st.pass}};

  const auto sign = rep.checks.find("sign");
  if (sign != rep.checks.end()) {
    CsvTable t({"sample_id", "sign_value"});
    for (size_t i = 0; i < sign->second.values.size(); ++i)
      t.add({static_cast<double>(i), sign->second.values[i]});
    res.files["check_sign.csv"] = t.str();
  }
  return st;
}

Point working_point(const ModelSpec& model) {
  if (model.x0.size() > 0) return model.x0;
  const SurfaceSampling s = sample_surface(model.geometry, SurfaceKind::intersection);
  if (s.points.empty()) throw InsufficientSamples("no intersection point to certify at");
  return s.points.front();
}

struct CertifyOutcome {
  Stage stage;
  std::optional<Certificate> cert;
  ScalarField psi0, psi1;
};

CertifyOutcome stage_certify(const ModelSpec& model, const RunConfig& cfg, RunResult& res) {
  CertifyOutcome out;
  const Point x0 = working_point(model);
  CertifyOptions opt;
  opt.lambda = cfg.lambda;
  if (cfg.samples) opt.n = *cfg.samples;
  opt.tol_pos = cfg.tol.pos;
  const Certificate c = certify(model.geometry, x0, opt);
  std::tie(out.psi0, out.psi1) = build_psi(model.geometry);

  Json j = {{"x0", to_json(c.x0)},
            {"m0", number(c.m0)},
            {"lambda0", number(c.lambda0)},
            {"lambda0_constraint", number(c.lambda0_constraint)},
            {"lambda", number(c.lambda_used)},
            {"worst_margin", number(c.worst_margin)},
            {"n_samples", c.n_samples},
            {"status", to_string(c.status)},
            {"pseudo_convex_on_samples", c.pseudo_convex_on_samples},
            {"finite_difference", c.finite_difference},
            {"note", c.note}};
  if (c.status != CertificateStatus::degenerate) {
    const ScalarField psi = combine(1.0, out.psi1, -c.lambda_used, square(out.psi0));
    const HormanderReport h = check_hormander(model.geometry.q, psi, x0, opt.n, opt.eps_c, opt.tol_pos);
    j["hormander"] = {{"pass", h.pass}, {"vacuous", h.vacuous}, {"max_hp2", number(h.max_hp2)},
                      {"n_samples", h.n_samples}};
    const CalderonReport cal = check_calderon(model.geometry.q, out.psi1, x0, opt.n, opt.tol_pos);
    j["calderon_psi1"] = {{"pass", cal.pass}, {"min_abs_hp", number(cal.min_abs_hp)},
                          {"n_samples", cal.n_samples}};
  }
  out.stage.pass = c.status == CertificateStatus::certified;
  j["pass"] = out.stage.pass;
  out.stage.report = j;

  const int n = static_cast<int>(x0.size());
  auto header = split_header("sample_id," + axis_names(n, "xi") +
                             ",hp2_psi1,hp_psi0,margin_key,margin_direct");
  CsvTable t(header);
  for (size_t i = 0; i < c.samples.size(); ++i) {
    const auto& s = c.samples[i];
    std::vector<double> row = {static_cast<double>(i)};
    for (int k = 0; k < n; ++k) row.push_back(s.xi[k]);
    row.insert(row.end(), {s.hp2_psi1, s.hp_psi0, s.margin_key, s.margin_direct});
    t.add(row);
  }
  res.files["constraint_samples.csv"] = t.str();
  out.cert = c;
  return out;
}

Stage stage_rays(const ModelSpec& model, const CertifyOutcome& cert, RunResult& res) {
  Stage st;
  const Certificate& c = *cert.cert;
  const ScalarField psi = combine(1.0, cert.psi1, -c.lambda_used, square(cert.psi0));
  const int n = static_cast<int>(c.x0.size());
  constexpr int kMaxRays = 64;
  constexpr double kStep = 1e-3;
  constexpr int kSteps = 100;

  CsvTable t(split_header("ray_id,s," + axis_names(n, "x") + "," + axis_names(n, "xi") + ",p,psi"));
  Json rays = Json::array();
  bool all = !c.samples.empty();
  const size_t count = std::min<size_t>(c.samples.size(), kMaxRays);
  for (size_t i = 0; i < count; ++i) {
    RayTrajectory tr =
        integrate_symmetric(model.geometry.q, {c.x0, c.samples[i].xi}, kStep, kSteps, model.geometry.box);
    const ContactReport r = contact(model.geometry.q, tr, psi);
    const ContactReport r1 = contact(model.geometry.q, tr, cert.psi1);
    const bool ok = r.tangency && r.side == ContactSide::below;
    all = all && ok;
    rays.push_back({{"ray_id", i},
                    {"tangency", r.tangency},
                    {"side", to_string(r.side)},
                    {"fitted_c1", number(r.fitted_c1)},
                    {"fitted_c2", number(r.fitted_c2)},
                    {"predicted_c2", number(r.predicted_c2)},
                    {"relative_c2_error", number(r.relative_c2_error)},
                    {"p_drift", number(tr.max_p_drift())},
                    {"psi1_side", to_string(r1.side)},
                    {"psi1_fitted_c2", number(r1.fitted_c2)},
                    {"psi1_predicted_c2", number(r1.predicted_c2)},
                    {"pass", ok}});
    with_psi(tr, psi);
    for (const auto& s : tr.samples) {
      std::vector<double> row = {static_cast<double>(i), s.s};
      for (int k = 0; k < n; ++k) row.push_back(s.x[k]);
      for (int k = 0; k < n; ++k) row.push_back(s.xi[k]);
      row.push_back(s.p);
      row.push_back(s.psi);
      t.add(row);
    }
  }
  st.pass = all;
  st.report = {{"lambda", number(c.lambda_used)}, {"n_rays", count}, {"rays", rays}, {"pass", all}};
  res.files["rays.csv"] = t.str();
  return st;
}

//--------------------------------------------------------------------------------------------------

std::string alpha_text(const std::vector<int>& a) {
  std::string s;
  for (size_t i = 0; i < a.size(); ++i) s += (i ? "-" : "") + std::to_string(a[i]);
  return s;
}

Stage stage_corner(const RunConfig& cfg, RunResult& res, std::ostream& log) {
  Stage st;
  constexpr int dim = 2;
  const int cells = cfg.grid.value_or(512);
  if (cells % 8 != 0) throw ConfigError("corner: grid must be a multiple of 8");
  const auto tests = test_function_corpus(dim, 20, cfg.seed);
  const auto corpus = analytic_corner_corpus(dim);
  const auto k_family = fit_weak_constants(corpus, tests, dim, cells / 4);

  CsvTable t({"u_id", "family", "alpha", "test_id", "lhs", "rhs", "residual"});
  Json per_u = Json::array();
  bool pass21 = true;
  double worst_refinement = std::numeric_limits<double>::infinity();
  for (size_t u = 0; u < corpus.size(); ++u) {
    const Lemma21Report fine = verify_lemma21(CornerField::make(corpus[u].u, dim, cells), tests, k_family);
    const Lemma21Report coarse = lemma21_residuals(CornerField::make(corpus[u].u, dim, cells / 2), tests);
    Json fam = Json::object();
    for (const auto& [family, r] : fine.max_residual) {
      const double ratio = r > 0.0 ? coarse.max_residual.at(family) / r
                                   : std::numeric_limits<double>::infinity();
      worst_refinement = std::min(worst_refinement, ratio);
      fam[family] = {{"max_residual", number(r)}, {"refinement_ratio", number(ratio)}};
    }
    pass21 = pass21 && fine.pass;
    per_u.push_back({{"u", corpus[u].name}, {"pass", fine.pass}, {"families", fam}});
    for (const auto& row : fine.rows)
      t.add({std::to_string(u), row.family, alpha_text(row.alpha)},
            {static_cast<double>(row.test_id), row.lhs, row.rhs, row.residual});
  }
  log << "corner: weak identities " << (pass21 ? "hold" : "FAIL") << ", worst refinement ratio "
      << worst_refinement << "\n";

  // Layer probe on U = y1 y2.
  const LayerReport layer = detect_layer(CornerField::make(corpus[0].u, dim, cells), tests);
  double worst_rel = 0.0;
  for (const auto& r : layer.rows)
    if (std::abs(r.surface) > 1e-3 * layer.max_layer)
      worst_rel = std::max(worst_rel, std::abs(r.delta - r.surface) / std::abs(r.surface));
  const bool layer_ok = layer.max_layer > 0.0 && worst_rel <= 0.01;

  // Lemma 2.3 with the antidiagonal B on sin(pi y1) sin(pi y2).
  const CornerField sf = CornerField::make(corpus[1].u, dim, cells);
  const BMatrixField b = [](const Point&) {
    Mat m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
  };
  const double c = measure_c(sf, b);
  const Lemma23Report l23 = verify_lemma23(sf, b, c, 10000, cfg.seed);

  // Mollifier commutator on the kink max(0, y1) * bump.
  const double h = 2.0 / cells;
  const double eps_min = std::max(0.025, 4.0 * h);
  std::vector<double> eps;
  for (int k = 4; k >= 0; --k) eps.push_back(eps_min * std::pow(2.0, k));
  const TestFunction bump{Vec::Zero(dim), Vec::Constant(dim, 0.7)};
  const Box unit{Vec::Constant(dim, -1.0), Vec::Constant(dim, 1.0)};
  const GridFunction kink = GridFunction::sample(
      unit, cells, [&](const Point& y) { return std::max(0.0, y[0]) * bump(y); });
  const auto norms = mollifier_commutator(linear_field(Vec::Unit(dim, 0)), kink, eps);
  const auto const_norms = mollifier_commutator(constant_field(2.5), kink, eps);
  bool monotone = true;
  for (size_t k = 1; k < norms.size(); ++k) monotone = monotone && norms[k] < norms[k - 1];
  const double decay = norms.back() / norms.front();
  const double const_max = *std::max_element(const_norms.begin(), const_norms.end());
  const bool moll_ok = monotone && decay <= 0.25 && const_max <= 1e-12;

  Json kj = Json::object();
  for (const auto& [f, k] : k_family) kj[f] = number(k);
  st.pass = pass21 && worst_refinement >= 3.5 && layer_ok && l23.pass && moll_ok;
  st.report = {
      {"grid", cells},
      {"h", number(h)},
      {"n_tests", tests.size()},
      {"k_family", kj},
      {"k_fit_grid", cells / 4},
      {"lemma21", {{"pass", pass21}, {"worst_refinement_ratio", number(worst_refinement)}, {"fields", per_u}}},
      {"layer", {{"max_layer", number(layer.max_layer)}, {"max_mismatch", number(layer.max_mismatch)},
                 {"worst_relative", number(worst_rel)}, {"pass", layer_ok}}},
      {"lemma23", {{"c", number(c)}, {"n_points", l23.n_points}, {"violations", l23.violations},
                   {"off_quadrant", l23.off_quadrant}, {"worst_ratio", number(l23.worst_ratio)},
                   {"max_fd_mismatch", number(l23.max_fd_mismatch)}, {"pass", l23.pass}}},
      {"mollifier", {{"eps", eps}, {"kink_norms", norms}, {"constant_a_norms", const_norms},
                     {"monotone", monotone}, {"decay", number(decay)}, {"pass", moll_ok}}},
      {"pass", st.pass}};
  res.files["corner_residuals.csv"] = t.str();
  return st;
}

//--------------------------------------------------------------------------------------------------

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Stage stage_carleman(const ModelSpec& model, double lambda_psi, const RunConfig& cfg,
                     RunResult& res, std::ostream& log) {
  Stage st;
  if (model.x0.size() == 0) throw ConfigError("carleman: the geometry needs x0");
  const CarlemanSetup setup = carleman_setup(model, lambda_psi);
  const WeightSpec weight = build_weight(setup.psi, cfg.mu);
  const int dim = setup.box.dim();
  const int cells = cfg.grid.value_or(dim == 2 ? 256 : 64);
  std::vector<double> lambdas;
  for (int k = 0; k <= 6; ++k) lambdas.push_back(std::pow(2.0, k));
  const int corpus_size = dim == 2 ? 50 : 10;

  const auto corpus = bump_corpus(setup.box, cells, corpus_size, cfg.seed);
  const CarlemanReport rep = lambda_sweep(setup.q, setup.lower, weight, corpus, lambdas);
  const auto fine_corpus = bump_corpus(setup.box, 2 * cells, corpus_size, cfg.seed);
  const CarlemanReport fine = lambda_sweep(setup.q, setup.lower, weight, fine_corpus, lambdas);

  auto r_star = [&](const CarlemanReport& r) {
    double m = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < lambdas.size(); ++k)
      if (lambdas[k] >= 4.0) m = std::min(m, r.r_min[k]);
    return m;
  };
  const double rs = r_star(rep), rs_fine = r_star(fine);
  const double stability = std::abs(rs_fine - rs) / rs;

  CsvTable t({"testfn_id", "lambda", "lhs", "rhs1", "rhs2", "ratio"});
  bool finite = true;
  for (const auto& row : rep.rows) {
    const auto& v = row.value;
    t.add({static_cast<double>(row.testfn_id), row.lambda, v.lhs, v.rhs1, v.rhs2, v.ratio});
    finite = finite && std::isfinite(v.lhs) && std::isfinite(v.rhs1) && std::isfinite(v.rhs2) &&
             std::isfinite(v.ratio);
  }
  // Exponent audit on the first test function.
  std::vector<double> a1, a2;
  for (const auto& row : rep.rows)
    if (row.testfn_id == 0) {
      a1.push_back(row.value.rhs1 / row.value.weighted_grad);
      a2.push_back(row.value.rhs2 / row.value.weighted_w);
    }
  const double slope1 = loglog_slope(lambdas, a1), slope2 = loglog_slope(lambdas, a2);

  st.pass = finite && rs > 0.0 && std::isfinite(rs) && stability <= 0.05;
  Json decreasing = Json::array();
  for (int k : rep.decreasing) decreasing.push_back(lambdas[k]);
  st.report = {{"coordinates", setup.coordinates},
               {"psi_lambda", number(lambda_psi)},
               {"mu", number(rep.mu)},
               {"h", number(rep.h)},
               {"grid", cells},
               {"corpus", corpus_size},
               {"lambdas", lambdas},
               {"r_min", rep.r_min},
               {"r_min_fine", fine.r_min},
               {"r_min_decreasing_at", decreasing},
               {"r_star", number(rs)},
               {"r_star_fine", number(rs_fine)},
               {"r_star_relative_change", number(stability)},
               {"slope_rhs1", number(slope1)},
               {"slope_rhs2", number(slope2)},
               {"note", "the weight does not enforce strict contact at x0"},
               {"pass", st.pass}};
  res.files["carleman.csv"] = t.str();
  log << "carleman: r* = " << rs << " (fine grid " << rs_fine << ")\n";
  return st;
}

Json config_json(const RunConfig& cfg) {
  Json j = {{"command", cfg.command},
            {"seed", cfg.seed},
            {"mu", cfg.mu},
            {"out", cfg.out},
            {"tolerances", {{"zero", cfg.tol.zero}, {"chr", cfg.tol.chr}, {"pos", cfg.tol.pos}, {"id", cfg.tol.id}}}};
  j["model"] = cfg.model ? Json(*cfg.model) : Json(nullptr);
  j["lambda"] = cfg.lambda ? Json(*cfg.lambda) : Json(nullptr);
  j["grid"] = cfg.grid ? Json(*cfg.grid) : Json(nullptr);
  j["samples"] = cfg.samples ? Json(*cfg.samples) : Json(nullptr);
  if (cfg.geometry) {
    const auto& g = *cfg.geometry;
    j["geometry"] = {{"dim", g.dim}, {"metric", g.metric}, {"phi_plus", g.phi_plus},
                     {"phi_minus", g.phi_minus}, {"box", g.box}, {"x0", g.x0}};
  }
  return j;
}

}  // namespace

RunResult run(const RunConfig& cfg, std::ostream& log) {
  validate(cfg);
  RunResult res;
  Json stages = Json::object();
  bool pass = true;

  auto record = [&](const std::string& name, const std::function<Stage()>& fn) -> bool {
    Stage st;
    try {
      st = fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const UcpError& e) {
      st.pass = false;
      st.report = {{"pass", false}, {"error", {{"kind", e.kind()}, {"message", e.what()}}}};
    }
    stages[name] = st.report;
    pass = pass && st.pass;
    log << name << ": " << (st.pass ? "PASS" : "FAIL") << "\n";
    return st.pass;
  };
  auto skip = [&](const std::string& name, const std::string& why) {
    stages[name] = {{"pass", false}, {"skipped", why}};
    pass = false;
    log << name << ": SKIPPED (" << why << ")\n";
  };

  const std::string& cmd = cfg.command;
  std::optional<ModelSpec> model;
  if (cmd != "corner") {
    model = resolve_model(cfg);
    model->geometry.tol = cfg.tol;
  }

  if (cmd == "check") {
    record("check", [&] { return stage_check(*model, res); });
  } else if (cmd == "certify" || cmd == "rays" || cmd == "carleman") {
    CertifyOutcome cert;
    const bool ok = record("certify", [&] {
      cert = stage_certify(*model, cfg, res);
      return cert.stage;
    });
    if (cmd == "rays") {
      if (ok) record("rays", [&] { return stage_rays(*model, cert, res); });
      else skip("rays", "certification failed");
    }
    if (cmd == "carleman") {
      if (ok) record("carleman", [&] { return stage_carleman(*model, cert.cert->lambda_used, cfg, res, log); });
      else skip("carleman", "certification failed");
    }
  } else if (cmd == "corner") {
    record("corner", [&] { return stage_corner(cfg, res, log); });
  } else if (cmd == "all") {
    const bool checked = record("check", [&] { return stage_check(*model, res); });
    CertifyOutcome cert;
    bool certified = false;
    if (checked)
      certified = record("certify", [&] {
        cert = stage_certify(*model, cfg, res);
        return cert.stage;
      });
    else
      skip("certify", "hypotheses failed");
    if (certified) record("rays", [&] { return stage_rays(*model, cert, res); });
    else skip("rays", "no certificate");
    record("corner", [&] { return stage_corner(cfg, res, log); });
    if (certified)
      record("carleman", [&] { return stage_carleman(*model, cert.cert->lambda_used, cfg, res, log); });
    else
      skip("carleman", "no certificate");
  }

  res.exit_code = pass ? kExitPass : kExitCheckFailed;
  res.report = {{"schema", kReportSchema},
                {"command", cmd},
                {"model", model ? Json(model->name) : Json(nullptr)},
                {"seed", cfg.seed},
                {"config", config_json(cfg)},
                {"stages", stages},
                {"pass", pass},
                {"exit_code", res.exit_code}};
  return res;
}

int execute(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  RunResult res;
  try {
    res = run(cfg, log);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  namespace fs = std::filesystem;
  const fs::path dir(cfg.out);
  for (const auto& [name, contents] : res.files) write_atomic((dir / name).string(), contents);
  write_atomic((dir / "report.json").string(), res.report.dump(2) + "\n");
  log << "report: " << (dir / "report.json").string() << "\n";
  return res.exit_code;
}

}  // namespace ucp
