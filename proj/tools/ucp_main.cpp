#include "ucp/driver.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Unique continuation across corners: geometry checks, pseudo-convexity "
               "certificates, ray contact, corner weak forms and Carleman sweeps."};
  std::string command, model, config, out;
  std::optional<double> lambda, mu, tol_zero, tol_chr, tol_pos, tol_id;
  std::optional<int> grid, samples;
  std::optional<unsigned long long> seed;

  app.add_option("command", command, "check | certify | rays | corner | carleman | all");
  app.add_option("--model", model, "ik2, ik3, ctrl-a, ctrl-b, ctrl-c, conformal2");
  app.add_option("--config", config, "key = value config file with [run], [geometry], [tolerances]");
  app.add_option("--lambda", lambda, "convexification parameter of psi1 - lambda psi0^2");
  app.add_option("--mu", mu, "Carleman weight rate, phi = exp(mu psi) - 1");
  app.add_option("--grid", grid, "cells per axis for the corner and Carleman grids");
  app.add_option("--samples", samples, "constraint-set seeds for certification");
  app.add_option("--seed", seed, "seed for every random corpus");
  app.add_option("--out", out, "output directory");
  app.add_option("--tol-zero", tol_zero, "surface membership tolerance");
  app.add_option("--tol-chr", tol_chr, "characteristic residual tolerance");
  app.add_option("--tol-pos", tol_pos, "strict positivity tolerance");
  app.add_option("--tol-id", tol_id, "algebraic identity tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return ucp::kExitUsage;
  }

  ucp::RunConfig cfg;
  try {
    if (!config.empty()) cfg = ucp::load_config(config);
  } catch (const ucp::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ucp::kExitUsage;
  }
  if (!command.empty()) cfg.command = command;
  if (!model.empty()) {
    cfg.model = model;
    cfg.geometry.reset();
  }
  if (lambda) cfg.lambda = *lambda;
  if (mu) cfg.mu = *mu;
  if (grid) cfg.grid = *grid;
  if (samples) cfg.samples = *samples;
  if (seed) cfg.seed = *seed;
  if (!out.empty()) cfg.out = out;
  if (tol_zero) cfg.tol.zero = *tol_zero;
  if (tol_chr) cfg.tol.chr = *tol_chr;
  if (tol_pos) cfg.tol.pos = *tol_pos;
  if (tol_id) cfg.tol.id = *tol_id;

  return ucp::execute(cfg, std::cout, std::cerr);
}
