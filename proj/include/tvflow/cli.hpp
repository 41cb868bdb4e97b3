#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tvflow/error.hpp"
#include "tvflow/io.hpp"
#include "tvflow/sfde.hpp"
#include "tvflow/stepfn.hpp"

namespace tvflow {

enum class OutputFormat { Json, Jsonl, Csv };

/// Every value is written into the header of each output.
struct Tolerances {
  double sandwich_eps = 1e-4;     ///< width of continuous-data sandwiches
  double profile_tol = 1e-3;      ///< relative error accepted by `asymptotics`
  double gap_tolerance = 1e-10;   ///< duality gap of the reference prox solver
  double rate_mass_tol = 1e-6;    ///< mass error of the sampled rate profile
  double compare_tol = 1e-8;      ///< agreement required by `selftest`
};

struct RunConfig {
  std::string subcommand;
  std::vector<std::string> inputs;
  std::optional<BoundaryMode> bc;
  double t_end = kInf;
  std::size_t samples = 10;
  Tolerances tol;
  std::string out;  ///< empty or "-" for stdout
  std::optional<OutputFormat> format;

  double step = 0.0;       ///< prox
  std::size_t iters = 1;   ///< prox
  std::string xi = "sqrt";              ///< rates
  std::string rate_mode = "no-rate";    ///< rates
  std::vector<double> remaining{0.5, 0.1, 0.01};  ///< rates
  SfdeMode sfde_mode = SfdeMode::Cauchy;
  std::optional<Interval> domain;  ///< sfde Dirichlet
  std::string kind;                ///< figure
  std::string emit_csv;            ///< evolve
  std::uint64_t seed = 0;          ///< selftest
};

/// Throws ConfigError on invalid settings.
void validate(const RunConfig& config);

OutputFormat default_format(const std::string& subcommand);

/// Executes one subcommand. Errors are reported as one JSON line on err and
/// mapped to exit codes: 0 ok, 1 domain error, 2 parse/config error.
int run(const RunConfig& config, std::ostream& err);

/// {"code": "module.Name", "message": ..., "exit": ...}
Json error_record(const Error& e);
int exit_code(ErrorCode code);

/// Long-format CSV "series,t,x,value" for maxstep, minmax, norate and
/// sfde-example2. Throws UnknownKind.
std::string figure_csv(const std::string& kind, std::size_t samples, const Tolerances& tol);

}  // namespace tvflow
