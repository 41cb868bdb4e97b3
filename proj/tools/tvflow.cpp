#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tvflow/cli.hpp"
#include "tvflow/random.hpp"

namespace {

tvflow::BoundaryMode parse_bc(const std::string& s) {
  if (s == "cauchy") return tvflow::BoundaryMode::Cauchy;
  return tvflow::BoundaryMode::Neumann;
}

tvflow::OutputFormat parse_format(const std::string& s) {
  if (s == "json") return tvflow::OutputFormat::Json;
  if (s == "jsonl") return tvflow::OutputFormat::Jsonl;
  return tvflow::OutputFormat::Csv;
}

tvflow::Interval parse_domain(const std::string& s) {
  std::istringstream in(s);
  double a = 0.0;
  double b = 0.0;
  char comma = 0;
  if (!(in >> a >> comma >> b) || comma != ',' || !in.eof())
    tvflow::fail(tvflow::ErrorCode::ParseError, "--domain expects 'a,b'");
  return {a, b};
}

int parse_error(const std::string& message) {
  tvflow::Json j;
  j["code"] = "cli.ParseError";
  j["message"] = message;
  j["exit"] = 2;
  std::cerr << tvflow::dump(j) << '\n';
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  tvflow::RunConfig cfg;
  std::string bc;
  std::string format;
  std::string domain;
  std::string sfde_mode = "cauchy";

  CLI::App app{"Exact total variation flow and sign fast diffusion in one dimension"};
  app.require_subcommand(1);
  const auto modes = CLI::IsMember({"cauchy", "neumann"});
  const auto formats = CLI::IsMember({"json", "jsonl", "csv"});

  auto common = [&](CLI::App* sub, bool input) {
    if (input) sub->add_option("--input", cfg.inputs, "input JSON file")->required();
    sub->add_option("--out", cfg.out, "output path (stdout if omitted)");
    sub->add_option("--format", format, "json, jsonl or csv")->check(formats);
    sub->add_option("--eps", cfg.tol.sandwich_eps, "sandwich width for continuous data");
    sub->add_option("--profile-tol", cfg.tol.profile_tol, "accepted relative error");
    sub->add_option("--gap-tol", cfg.tol.gap_tolerance, "reference prox duality gap");
    sub->add_option("--rate-mass-tol", cfg.tol.rate_mass_tol, "rate profile mass error");
    sub->add_option("--compare-tol", cfg.tol.compare_tol, "selftest agreement");
  };

  auto* evolve = app.add_subcommand("evolve", "exact event-driven flow of a step function");
  common(evolve, true);
  evolve->add_option("--bc", bc, "boundary condition")->check(modes);
  evolve->add_option("--t-end", cfg.t_end, "time horizon (default: until stationary)");
  evolve->add_option("--samples", cfg.samples, "uniform time samples");
  evolve->add_option("--emit-csv", cfg.emit_csv, "also write (t, x, value) rows here");

  auto* prox = app.add_subcommand("prox", "implicit Euler steps with dual certificate");
  common(prox, true);
  prox->add_option("--bc", bc, "boundary condition")->check(modes);
  prox->add_option("--step", cfg.step, "step size h")->required();
  prox->add_option("--iters", cfg.iters, "number of steps");

  auto* sfde = app.add_subcommand("sfde", "sign fast diffusion of a sum of deltas");
  common(sfde, true);
  sfde->add_option("--mode", sfde_mode, "cauchy or dirichlet")
      ->check(CLI::IsMember({"cauchy", "dirichlet"}));
  sfde->add_option("--domain", domain, "a,b for dirichlet mode");
  sfde->add_option("--t", cfg.t_end, "final time")->required();
  sfde->add_option("--samples", cfg.samples, "uniform time samples");

  auto* profile = app.add_subcommand("profile-evolve", "certified flow of a continuous profile");
  common(profile, true);
  profile->add_option("--t", cfg.t_end, "time")->required();

  auto* asym = app.add_subcommand("asymptotics", "relative error to the extinction profile");
  common(asym, true);
  asym->add_option("--bc", bc, "boundary condition")->check(modes);
  asym->add_option("--samples", cfg.samples, "samples at t = T (1 - 2^-k)");

  auto* rates = app.add_subcommand("rates", "rate-function construction and bound check");
  common(rates, false);
  rates->add_option("--xi", cfg.xi, "sqrt, identity or pow:<p>");
  rates->add_option("--mode", cfg.rate_mode, "no-rate or fast-rate")
      ->check(CLI::IsMember({"no-rate", "fast-rate"}));
  rates->add_option("--remaining", cfg.remaining, "values of T - t")->delimiter(',');

  auto* figure = app.add_subcommand("figure", "plot data as long-format CSV");
  common(figure, false);
  figure->add_option("--kind", cfg.kind, "maxstep, minmax, norate or sfde-example2")->required();
  figure->add_option("--samples", cfg.samples, "time samples");

  auto* selftest = app.add_subcommand("selftest", "randomized cross-checks (seed: TVFLOW_SEED)");
  common(selftest, false);
  selftest->add_option("--samples", cfg.samples, "random instances per check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return parse_error(e.what());
  }

  try {
    cfg.subcommand = app.get_subcommands().front()->get_name();
    if (!bc.empty()) cfg.bc = parse_bc(bc);
    if (!format.empty()) cfg.format = parse_format(format);
    cfg.sfde_mode = sfde_mode == "dirichlet" ? tvflow::SfdeMode::Dirichlet : tvflow::SfdeMode::Cauchy;
    if (!domain.empty()) cfg.domain = parse_domain(domain);
    cfg.seed = tvflow::seed_from_env(20240601);
  } catch (const tvflow::Error& e) {
    std::cerr << tvflow::dump(tvflow::error_record(e)) << '\n';
    return tvflow::exit_code(e.code());
  }
  return tvflow::run(cfg, std::cerr);
}
