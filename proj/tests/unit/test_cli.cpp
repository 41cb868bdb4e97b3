#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tvflow/cli.hpp"
#include "tvflow/flow.hpp"
#include "tvflow/io.hpp"
#include "tvflow/random.hpp"

using namespace tvflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "tvflow_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Json> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<Json> out;
  for (std::string line; std::getline(in, line);) out.push_back(parse_json(line));
  return out;
}

RunConfig config(const std::string& sub, const fs::path& in, const fs::path& out) {
  RunConfig c;
  c.subcommand = sub;
  if (!in.empty()) c.inputs = {in.string()};
  c.out = out.string();
  return c;
}

}  // namespace

TEST_CASE("JSON round trips") {
  Rng rng(83);
  for (int trial = 0; trial < 50; ++trial) {
    RandomStepOptions o;
    o.nonnegative = false;
    o.zero_tails = false;
    o.mode = trial % 2 == 0 ? BoundaryMode::Cauchy : BoundaryMode::Neumann;
    const auto u = random_step_function(rng, o);
    CHECK(step_function_from_json(parse_json(dump(to_json(u)))) == u);
    const auto v = random_deltas(rng, 6);
    CHECK(deltas_from_json(parse_json(dump(to_json(v)))) == v);
  }
  const PiecewiseLinear p({0, 0.1, 1.0 / 3.0}, {0, 1e-300, 2.0 / 7.0});
  CHECK(profile_from_json(parse_json(dump(to_json(p)))) == p);
  CHECK(dump(Json(0.1)) == "0.10000000000000001");
  CHECK(number_from_json(Json("-inf")) == -kInf);
}

TEST_CASE("schema errors") {
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoError;
  };
  CHECK(code([] { parse_json("{bad"); }) == ErrorCode::ParseError);
  CHECK(code([] { step_function_from_json(parse_json("[1]")); }) == ErrorCode::ParseError);
  CHECK(code([] { step_function_from_json(parse_json(R"({"values":[0]})")); }) ==
        ErrorCode::ParseError);
  CHECK(code([] {
          step_function_from_json(parse_json(R"({"mode":"neumann","breakpoints":[],"values":[1]})"));
        }) == ErrorCode::ParseError);
  CHECK(code([] {
          step_function_from_json(parse_json(R"({"mode":"cauchy","breakpoints":[],"values":[1]})"),
                                  BoundaryMode::Neumann);
        }) == ErrorCode::ConfigError);
  CHECK(code([] { deltas_from_json(parse_json(R"({"atoms":[[0]]})")); }) == ErrorCode::ParseError);
  CHECK(code([] { read_json_file("/nonexistent/x.json"); }) == ErrorCode::IoError);
}

TEST_CASE("evolve emits the extinction event and re-parsable states") {
  const auto in = scratch("chi.json");
  const auto out = scratch("chi.jsonl");
  write_file(in, dump(to_json(StepFunction::indicator(0, 1))));
  auto c = config("evolve", in, out);
  c.samples = 5;
  std::ostringstream err;
  REQUIRE(run(c, err) == 0);
  const auto lines = read_lines(out);
  REQUIRE(lines.size() >= 2);
  CHECK(lines.front()["kind"] == "header");
  bool found = false;
  for (const Json& j : lines) {
    if (j["kind"] == "event" && j["event"] == "Extinction") {
      CHECK(j["t"].get<double>() == 0.5);
      found = true;
    }
    if (j["kind"] == "sample") {
      const auto state = step_function_from_json(j["state"]);
      CHECK(state == advance(StepFunction::indicator(0, 1), j["t"].get<double>()));
    }
  }
  CHECK(found);
}

TEST_CASE("outputs are byte-identical across runs") {
  const auto in = scratch("two.json");
  write_file(in, dump(to_json(StepFunction::cauchy({0, 1, 2, 3}, {0, 1, 0.3, 2, 0}))));
  for (const char* sub : {"evolve", "prox", "asymptotics"}) {
    auto a = config(sub, in, scratch(std::string(sub) + "_a.out"));
    auto b = config(sub, in, scratch(std::string(sub) + "_b.out"));
    a.step = b.step = 0.05;
    std::ostringstream err;
    REQUIRE(run(a, err) == 0);
    REQUIRE(run(b, err) == 0);
    CHECK(read_file(a.out) == read_file(b.out));
  }
}

TEST_CASE("prox diff against the closed form vanishes under the smallness bound") {
  const auto in = scratch("maxstep.json");
  const auto out = scratch("maxstep_prox.json");
  write_file(in, dump(to_json(StepFunction::cauchy({0, 1}, {0.5, 2.0, 1.0}))));
  auto c = config("prox", in, out);
  c.step = 0.05;
  c.iters = 3;
  std::ostringstream err;
  REQUIRE(run(c, err) == 0);
  const Json j = parse_json(read_file(out));
  CHECK(j["closed_form"]["max_abs_diff"].get<double>() <= 1e-12);
  CHECK(j["closed_form"]["ell_h"].get<double>() < j["closed_form"]["small_step_bound"].get<double>());
  CHECK(j["certificate_residuals"]["feasibility"].get<double>() <= 1e-12);
}

TEST_CASE("malformed input gives exit 2 with a ParseError record") {
  const auto in = scratch("bad.json");
  write_file(in, "{not json");
  std::ostringstream err;
  CHECK(run(config("evolve", in, scratch("bad.out")), err) == 2);
  const Json rec = parse_json(err.str());
  CHECK(rec["code"] == "cli.ParseError");
  CHECK(rec["exit"] == 2);
}

TEST_CASE("domain errors give exit 1 with a module-qualified code") {
  const auto in = scratch("neg.json");
  write_file(in, dump(to_json(StepFunction::cauchy({0, 1}, {0, -1, 0}))));
  std::ostringstream err;
  CHECK(run(config("asymptotics", in, scratch("neg.out")), err) == 1);
  CHECK(parse_json(err.str())["code"] == "flow.SignedData");
}

TEST_CASE("config validation") {
  std::ostringstream err;
  RunConfig c;
  c.subcommand = "nope";
  CHECK(run(c, err) == 2);
  c.subcommand = "rates";
  c.tol.sandwich_eps = 0.0;
  CHECK(run(c, err) == 2);
  c.tol.sandwich_eps = 1e-3;
  c.samples = 0;
  CHECK(run(c, err) == 2);
}

TEST_CASE("figure data") {
  Tolerances tol;
  tol.sandwich_eps = 1e-3;
  const std::string maxstep = figure_csv("maxstep", 5, tol);
  CHECK(maxstep.rfind("series,t,x,value\n", 0) == 0);
  // alpha_2 starts at 1.5 and drops at rate 2 / |I_2| = 2 until the first merge.
  std::istringstream in(maxstep);
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    if (line.rfind("alpha_2,0,", 0) == 0) CHECK(line == "alpha_2,0,1.5,1.5");
  }
  CHECK(rows == 15);
  CHECK(figure_csv("norate", 3, tol).find("bound,") != std::string::npos);
  const std::string sf = figure_csv("sfde-example2", 3, tol);
  for (const char* s : {"atom_weight,", "z1,", "z2,", "z3,"}) CHECK(sf.find(s) != std::string::npos);
  CHECK(figure_csv("minmax", 2, tol).find("upper,") != std::string::npos);
  try {
    figure_csv("pie", 2, tol);
    FAIL("expected UnknownKind");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownKind);
  }
}

TEST_CASE("sfde and rates subcommands") {
  const auto in = scratch("dipole.json");
  write_file(in, R"({"atoms":[[0,1],[1,-1]]})");
  auto c = config("sfde", in, scratch("dipole.jsonl"));
  c.t_end = 1.0;
  c.samples = 3;
  std::ostringstream err;
  REQUIRE(run(c, err) == 0);
  const auto lines = read_lines(c.out);
  CHECK(lines.back()["direct_extinction_time"].get<double>() == 0.5);

  auto r = config("rates", {}, scratch("rates.json"));
  r.xi = "identity";
  r.remaining = {0.1};
  r.tol.sandwich_eps = 1e-3;
  REQUIRE(run(r, err) == 0);
  const Json j = parse_json(read_file(r.out));
  CHECK(j["c0"].get<double>() == 4.0);
  CHECK(j["samples"].size() == 1);
}
