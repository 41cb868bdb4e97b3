#include "tvflow/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tvflow/asymptotics.hpp"
#include "tvflow/flow.hpp"
#include "tvflow/profiles.hpp"
#include "tvflow/prox.hpp"
#include "tvflow/random.hpp"

namespace tvflow {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const char* to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::Json: return "json";
    case OutputFormat::Jsonl: return "jsonl";
    case OutputFormat::Csv: return "csv";
  }
  return "json";
}

Json tolerances_json(const Tolerances& t) {
  Json j;
  j["sandwich_eps"] = t.sandwich_eps;
  j["profile_tol"] = t.profile_tol;
  j["gap_tolerance"] = t.gap_tolerance;
  j["rate_mass_tol"] = t.rate_mass_tol;
  j["compare_tol"] = t.compare_tol;
  j["merge_tie_rel"] = 64.0 * std::numeric_limits<double>::epsilon();
  return j;
}

Json header(const RunConfig& c) {
  Json j;
  j["kind"] = "header";
  j["tool"] = "tvflow";
  j["version"] = kVersion;
  j["subcommand"] = c.subcommand;
  j["format"] = to_string(c.format.value_or(default_format(c.subcommand)));
  j["tolerances"] = tolerances_json(c.tol);
  return j;
}

Json atoms_json(const DeltaMeasure& v) { return to_json(v)["atoms"]; }

Json interval_json(Interval I) { return {number_to_json(I.lo), number_to_json(I.hi)}; }

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) fail(ErrorCode::IoError, "cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  void line(const Json& j) { stream() << dump(j) << '\n'; }
  void text(const std::string& s) { stream() << s; }
  void finish() {
    stream().flush();
    if (!stream()) fail(ErrorCode::IoError, "write failed");
  }

 private:
  std::ofstream file_;
};

const std::string& single_input(const RunConfig& c) {
  if (c.inputs.size() != 1) fail(ErrorCode::ConfigError, c.subcommand + " needs exactly one --input");
  return c.inputs.front();
}

std::vector<double> uniform_times(double T, std::size_t k) {
  std::vector<double> ts;
  if (k == 1) return {T};
  for (std::size_t i = 0; i < k; ++i)
    ts.push_back(T * static_cast<double>(i) / static_cast<double>(k - 1));
  ts.back() = T;
  return ts;
}

// Interval midpoints, plus one point in each Cauchy tail.
std::vector<double> plot_grid(const StepFunction& u) {
  std::vector<double> xs;
  auto bps = u.breakpoints();
  if (u.mode() == BoundaryMode::Cauchy) {
    if (bps.empty()) return {0.0};
    xs.push_back(bps.front() - 1.0);
  }
  for (std::size_t k = 0; k < u.num_intervals(); ++k) {
    const Interval I = u.interval(k);
    if (I.bounded()) xs.push_back(I.lo + 0.5 * I.length());
  }
  if (u.mode() == BoundaryMode::Cauchy) xs.push_back(bps.back() + 1.0);
  return xs;
}

// Last time anything happens when the run was open-ended.
double settled_time(const Trajectory& traj) {
  const double H = traj.horizon();
  if (std::isfinite(H)) return H;
  return traj.events().empty() ? 0.0 : traj.events().back().time;
}

void run_evolve(const RunConfig& c) {
  const StepFunction u0 = step_function_from_json(read_json_file(single_input(c)), c.bc);
  const Trajectory traj = evolve(u0, c.t_end);
  const double H = settled_time(traj);
  const auto times = uniform_times(H, c.samples);
  const OutputFormat format = c.format.value_or(OutputFormat::Jsonl);

  std::vector<std::pair<double, Json>> records;
  for (const FlowEvent& e : traj.events()) {
    Json j;
    j["kind"] = "event";
    j["t"] = number_to_json(e.time);
    j["event"] = to_string(e.kind);
    Json removed = Json::array();
    for (double x : e.removed) removed.push_back(number_to_json(x));
    j["removed"] = std::move(removed);
    j["state"] = to_json(e.state_after);
    records.emplace_back(e.time, std::move(j));
  }
  std::vector<StepFunction> states;
  for (double t : times) {
    states.push_back(traj.sample(t));
    Json j;
    j["kind"] = "sample";
    j["t"] = number_to_json(t);
    j["state"] = to_json(states.back());
    records.emplace_back(t, std::move(j));
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  Output out(c.out);
  if (format == OutputFormat::Jsonl) {
    out.line(header(c));
    for (const auto& r : records) out.line(r.second);
  } else if (format == OutputFormat::Json) {
    Json j;
    j["header"] = header(c);
    Json arr = Json::array();
    for (auto& r : records) arr.push_back(r.second);
    j["records"] = std::move(arr);
    out.line(j);
  } else {
    out.text("t,x,value\n");
    const auto xs = plot_grid(u0);
    for (std::size_t i = 0; i < times.size(); ++i)
      for (double x : xs) out.text(fmt(times[i]) + "," + fmt(x) + "," + fmt(states[i](x)) + "\n");
  }
  out.finish();

  if (!c.emit_csv.empty()) {
    Output csv(c.emit_csv);
    csv.text("t,x,value\n");
    const auto xs = plot_grid(u0);
    for (std::size_t i = 0; i < times.size(); ++i)
      for (double x : xs) csv.text(fmt(times[i]) + "," + fmt(x) + "," + fmt(states[i](x)) + "\n");
    csv.finish();
  }
}

void run_prox(const RunConfig& c) {
  const StepFunction u0 = step_function_from_json(read_json_file(single_input(c)), c.bc);
  StepFunction prev = u0;
  ProxResult res = tv_prox(u0, c.step);
  for (std::size_t i = 1; i < c.iters; ++i) {
    prev = res.u_h;
    res = tv_prox(prev, c.step);
  }
  const CertificateResiduals r = check_certificate(prev, res);

  Json j;
  j["header"] = header(c);
  j["step"] = c.step;
  j["iters"] = c.iters;
  j["u_h"] = to_json(res.u_h);
  j["objective"] = number_to_json(res.objective);
  Json z;
  Json pos = Json::array();
  Json vals = Json::array();
  for (double x : res.certificate.positions) pos.push_back(number_to_json(x));
  for (double v : res.certificate.z) vals.push_back(v);
  z["positions"] = std::move(pos);
  z["values"] = std::move(vals);
  z["z_left"] = res.certificate.z_left;
  z["z_right"] = res.certificate.z_right;
  z["exterior_constrained"] = res.certificate.exterior_constrained;
  j["z"] = std::move(z);
  Json rj;
  rj["feasibility"] = r.feasibility;
  rj["jump_sign"] = r.jump_sign;
  rj["flux"] = r.flux;
  rj["boundary"] = r.boundary;
  j["certificate_residuals"] = std::move(rj);

  const StepFunction closed = closed_form_steps(u0, c.step, c.iters);
  const double ell_h = static_cast<double>(c.iters) * c.step;
  Json cf;
  cf["ell_h"] = ell_h;
  cf["small_step_bound"] = number_to_json(small_step_bound(u0));
  cf["first_merge_horizon"] = number_to_json(slope_field(u0).horizon);
  cf["within_horizon"] = ell_h < slope_field(u0).horizon;
  cf["values"] = to_json(closed);
  cf["max_abs_diff"] = number_to_json(lp_distance(closed, res.u_h, kInf));
  j["closed_form"] = std::move(cf);

  Output out(c.out);
  out.line(j);
  out.finish();
}

void run_sfde(const RunConfig& c) {
  const DeltaMeasure v0 = deltas_from_json(read_json_file(single_input(c)));
  SfdeProblem pb;
  pb.mode = c.sfde_mode;
  if (pb.mode == SfdeMode::Dirichlet) {
    if (!c.domain) fail(ErrorCode::ConfigError, "dirichlet mode needs --domain a,b");
    pb.domain = *c.domain;
  }
  double T = c.t_end;
  if (!std::isfinite(T)) fail(ErrorCode::ConfigError, "sfde needs a finite --t");
  bool direct = true;
  if (pb.mode == SfdeMode::Dirichlet)
    for (const Atom& at : v0.atoms()) direct = direct && at.a > 0.0;

  Output out(c.out);
  Json h = header(c);
  h["mode"] = pb.mode == SfdeMode::Cauchy ? "cauchy" : "dirichlet";
  if (pb.mode == SfdeMode::Dirichlet) h["domain"] = interval_json(pb.domain);
  out.line(h);
  for (double t : uniform_times(T, c.samples)) {
    const DeltaMeasure via = evolve_via_tvf(v0, t, pb);
    Json j;
    j["kind"] = "sample";
    j["t"] = t;
    j["via_flow"] = atoms_json(via);
    j["direct"] = direct ? atoms_json(evolve_deltas(v0, t, pb)) : Json(nullptr);
    j["mass"] = total_mass(via);
    out.line(j);
  }
  Json s;
  s["kind"] = "summary";
  s["total_mass"] = total_mass(v0);
  s["extinguishes"] = extinguishes(v0);
  s["direct_extinction_time"] =
      direct ? number_to_json(deltas_extinction_time(v0, pb)) : Json(nullptr);
  out.line(s);
  out.finish();
}

void run_profile_evolve(const RunConfig& c) {
  const PiecewiseLinear u0 = profile_from_json(read_json_file(single_input(c)));
  if (!std::isfinite(c.t_end)) fail(ErrorCode::ConfigError, "profile-evolve needs a finite --t");
  const Bracket b = evolve_continuous(u0, c.t_end, c.tol.sandwich_eps);
  Json j;
  j["header"] = header(c);
  j["t"] = c.t_end;
  j["eps"] = c.tol.sandwich_eps;
  j["lower"] = to_json(b.lower);
  j["upper"] = to_json(b.upper);
  j["gap_inf"] = b.gap_inf;
  try {
    const LevelCut cut = evolve_unimodal(u0, c.t_end);
    Json lc;
    lc["level"] = cut.level;
    lc["rate"] = number_to_json(cut.rate);
    lc["plateau"] = interval_json(cut.plateau);
    lc["residual"] = cut.residual;
    lc["state"] = to_json(cut.state);
    j["level_cut"] = std::move(lc);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotUnimodal && e.code() != ErrorCode::BeyondExtinction) throw;
    j["level_cut"] = nullptr;
  }
  Output out(c.out);
  out.line(j);
  out.finish();
}

void run_asymptotics(const RunConfig& c) {
  const StepFunction u0 = step_function_from_json(read_json_file(single_input(c)), c.bc);
  const StationaryProfile p = extinction_profile(u0);
  std::vector<double> times;
  for (std::size_t k = 1; k <= c.samples; ++k) times.push_back(p.T * (1.0 - std::ldexp(1.0, -static_cast<int>(k))));
  const Trajectory traj = evolve(u0, p.T);
  Json j;
  j["header"] = header(c);
  j["T"] = p.T;
  j["support"] = interval_json(p.support);
  j["height"] = p.height;
  Json arr = Json::array();
  for (double t : times) {
    const double e = relative_error(traj, t);
    Json s;
    s["t"] = t;
    s["s"] = rescaled_time(p.T, t);
    s["error"] = e;
    s["bound"] = c.tol.profile_tol;
    s["pass"] = e <= c.tol.profile_tol;
    arr.push_back(std::move(s));
  }
  j["samples"] = std::move(arr);
  Output out(c.out);
  out.line(j);
  out.finish();
}

Json rate_sample_json(const RateSample& s) {
  Json j;
  j["t"] = s.t;
  j["remaining"] = s.remaining;
  j["applicable"] = s.applicable;
  j["error_lower"] = s.error_lower;
  j["error_upper"] = s.error_upper;
  j["error_exact"] = s.error_exact;
  j["bound"] = s.bound;
  j["pass"] = s.applicable && s.bound_pass;
  j["sup_lower"] = s.sup_lower;
  j["sup_upper"] = s.sup_upper;
  j["sup_pass"] = s.applicable && s.sup_pass;
  j["alpha0"] = s.alpha0;
  j["alpha0_formula"] = s.alpha0_formula;
  j["xi_remaining"] = s.xi_remaining;
  return j;
}

void run_rates(const RunConfig& c) {
  const RateFunction xi = parse_rate(c.xi);
  const RateMode mode = parse_rate_mode(c.rate_mode);
  const RateReport rep = verify_rate(xi, mode, c.remaining, c.tol.sandwich_eps);
  Json j;
  j["header"] = header(c);
  j["xi"] = rep.xi;
  j["mode"] = to_string(rep.mode);
  j["c0"] = rep.c0;
  j["T"] = rep.T;
  j["eps"] = rep.eps;
  j["profile_mass_error"] = rep.profile_mass_error;
  Json arr = Json::array();
  for (const RateSample& s : rep.samples) arr.push_back(rate_sample_json(s));
  j["samples"] = std::move(arr);
  Output out(c.out);
  out.line(j);
  out.finish();
}

void run_figure(const RunConfig& c) {
  const std::string csv = figure_csv(c.kind, c.samples, c.tol);
  Output out(c.out);
  out.text(csv);
  out.finish();
}

struct Check {
  std::string name;
  std::size_t instances = 0;
  std::size_t failures = 0;
  double max_error = 0.0;
  void record(double err, double tol) {
    ++instances;
    max_error = std::max(max_error, err);
    if (!(err <= tol)) ++failures;
  }
};

void run_selftest(const RunConfig& c, bool& all_pass) {
  Rng rng(c.seed);
  Check ext{"extinction_time"};
  Check prox{"prox_vs_reference"};
  Check square{"sfde_commuting_square"};
  BruteForceOptions bf;
  bf.gap_tolerance = c.tol.gap_tolerance;
  for (std::size_t i = 0; i < c.samples; ++i) {
    const StepFunction u = random_step_function(rng);
    const Trajectory traj = evolve(u, kInf);
    const double T = traj.events().empty() ? 0.0 : traj.events().back().time;
    ext.record(std::abs(T - 0.5 * mass(u)), 1e-10);

    RandomStepOptions o;
    o.max_intervals = 8;
    o.nonnegative = false;
    o.mode = i % 2 == 0 ? BoundaryMode::Cauchy : BoundaryMode::Neumann;
    const StepFunction w = random_step_function(rng, o);
    const double h = std::uniform_real_distribution<double>(0.01, 2.0)(rng);
    const ProxResult fast = tv_prox(w, h);
    const BruteForceResult ref = brute_force_prox(w, h, bf);
    prox.record(lp_distance(fast.u_h, ref.u_h, kInf), c.tol.compare_tol);

    const DeltaMeasure v = random_deltas(rng, 8);
    const double t = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
    const StepFunction a = integrate(evolve_via_tvf(v, t));
    const StepFunction b = integrate(evolve_deltas(v, t));
    square.record(lp_distance(a, b, kInf), 1e-12);
  }
  Json j;
  j["header"] = header(c);
  j["seed"] = c.seed;
  Json arr = Json::array();
  all_pass = true;
  for (const Check* k : {&ext, &prox, &square}) {
    Json r;
    r["name"] = k->name;
    r["instances"] = k->instances;
    r["failures"] = k->failures;
    r["max_error"] = k->max_error;
    arr.push_back(std::move(r));
    all_pass = all_pass && k->failures == 0;
  }
  j["checks"] = std::move(arr);
  j["pass"] = all_pass;
  Output out(c.out);
  out.line(j);
  out.finish();
}

// ---------------------------------------------------------------------------

void csv_row(std::ostringstream& os, const std::string& series, double t, std::optional<double> x,
             double value) {
  os << series << ',' << fmt(t) << ',' << (x ? fmt(*x) : std::string()) << ',' << fmt(value)
     << '\n';
}

std::string figure_maxstep(std::size_t samples) {
  const StepFunction u0 = StepFunction::neumann({0.0, 3.0}, {1.0, 2.0}, {0.5, 1.5, 0.25});
  const Trajectory traj = evolve(u0, kInf);
  std::ostringstream os;
  os << "series,t,x,value\n";
  for (double t : uniform_times(settled_time(traj), std::max<std::size_t>(samples, 2))) {
    const StepFunction u = traj.sample(t);
    for (std::size_t k = 0; k < 3; ++k) {
      const double x = 0.5 + static_cast<double>(k);
      csv_row(os, "alpha_" + std::to_string(k + 1), t, x, u(x));
    }
  }
  return os.str();
}

std::string figure_minmax(std::size_t samples, double eps) {
  const PiecewiseLinear u0({0.0, 1.0, 2.0, 3.0, 4.0}, {0.0, 1.0, 0.4, 0.8, 0.0});
  const double T = 0.5 * u0.mass();
  const Sandwich s = sandwich(u0, eps);
  const auto times = uniform_times(T, std::max<std::size_t>(samples, 2));
  const auto lows = states_at(s.lower, times);
  const auto highs = states_at(s.upper, times);
  std::ostringstream os;
  os << "series,t,x,value\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (int k = 0; k <= 80; ++k) {
      const double x = -0.5 + 5.0 * k / 80.0;
      csv_row(os, "lower", times[i], x, lows[i](x));
      csv_row(os, "upper", times[i], x, highs[i](x));
    }
  }
  return os.str();
}

std::string figure_norate(std::size_t samples, double eps) {
  const RateFunction xi = sqrt_rate();
  const PiecewiseLinear pl = build_rate_profile(xi, RateMode::NoRate);
  const double T = 0.5 * pl.mass();
  std::vector<double> rem;
  for (std::size_t k = 1; k <= std::max<std::size_t>(samples, 2); ++k)
    rem.push_back(T * std::ldexp(1.0, -static_cast<int>(k)));
  const RateReport rep = verify_rate(xi, RateMode::NoRate, rem, eps);
  std::ostringstream os;
  os << "series,t,x,value\n";
  for (const RateSample& s : rep.samples) {
    csv_row(os, "relative_error", s.t, std::nullopt, s.error_exact);
    csv_row(os, "error_lower", s.t, std::nullopt, s.error_lower);
    csv_row(os, "error_upper", s.t, std::nullopt, s.error_upper);
    csv_row(os, "bound", s.t, std::nullopt, s.bound);
  }
  return os.str();
}

std::string figure_sfde_example2(std::size_t samples) {
  const MixedProblem pb = default_mixed_problem();
  const double t1 = evolve_mixed(pb, 0.0, 0.0).t1;
  std::ostringstream os;
  os << "series,t,x,value\n";
  for (double t : uniform_times(1.25 * t1, std::max<std::size_t>(samples, 2))) {
    const MixedReport r = evolve_mixed(pb, t, 0.0);
    csv_row(os, "atom_weight", t, std::nullopt, r.atom_weight);
    csv_row(os, "z_left", t, std::nullopt, r.z_left);
    csv_row(os, "z1", t, std::nullopt, r.z1);
    csv_row(os, "z2", t, std::nullopt, r.z2);
    csv_row(os, "z3", t, std::nullopt, r.z3);
    csv_row(os, "max_level", t, std::nullopt, r.max_level);
    csv_row(os, "min_level", t, std::nullopt, r.min_level);
  }
  return os.str();
}

}  // namespace

OutputFormat default_format(const std::string& subcommand) {
  if (subcommand == "evolve" || subcommand == "sfde") return OutputFormat::Jsonl;
  if (subcommand == "figure") return OutputFormat::Csv;
  return OutputFormat::Json;
}

void validate(const RunConfig& c) {
  static const std::vector<std::string> known{"evolve",       "prox",   "sfde",   "profile-evolve",
                                              "asymptotics",  "rates",  "figure", "selftest"};
  if (std::find(known.begin(), known.end(), c.subcommand) == known.end())
    fail(ErrorCode::ConfigError, "unknown subcommand '" + c.subcommand + "'");
  const Tolerances& t = c.tol;
  for (double v : {t.sandwich_eps, t.profile_tol, t.gap_tolerance, t.rate_mass_tol, t.compare_tol})
    if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorCode::ConfigError, "tolerances must be positive");
  if (c.samples < 1) fail(ErrorCode::ConfigError, "sample count must be at least 1");
  if (!(c.t_end >= 0.0)) fail(ErrorCode::ConfigError, "time horizon must be nonnegative");
  if (c.format && *c.format != default_format(c.subcommand)) {
    const bool evolve_alt = c.subcommand == "evolve";
    if (!evolve_alt)
      fail(ErrorCode::ConfigError,
           std::string("format '") + to_string(*c.format) + "' is not available for " + c.subcommand);
  }
  if (c.subcommand == "prox" && c.iters < 1) fail(ErrorCode::ConfigError, "--iters must be >= 1");
  if (c.subcommand == "rates" && c.remaining.empty())
    fail(ErrorCode::ConfigError, "rates needs at least one remaining time");
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::ConfigError:
    case ErrorCode::UnknownKind:
    case ErrorCode::IoError:
      return 2;
    default:
      return 1;
  }
}

Json error_record(const Error& e) {
  Json j;
  j["code"] = qualified_name(e.code());
  j["message"] = e.what();
  j["exit"] = exit_code(e.code());
  return j;
}

std::string figure_csv(const std::string& kind, std::size_t samples, const Tolerances& tol) {
  if (kind == "maxstep") return figure_maxstep(samples);
  if (kind == "minmax") return figure_minmax(samples, tol.sandwich_eps);
  if (kind == "norate") return figure_norate(samples, tol.sandwich_eps);
  if (kind == "sfde-example2") return figure_sfde_example2(samples);
  fail(ErrorCode::UnknownKind, "unknown figure kind '" + kind + "'");
}

int run(const RunConfig& config, std::ostream& err) {
  try {
    validate(config);
    const std::string& s = config.subcommand;
    if (s == "evolve") run_evolve(config);
    else if (s == "prox") run_prox(config);
    else if (s == "sfde") run_sfde(config);
    else if (s == "profile-evolve") run_profile_evolve(config);
    else if (s == "asymptotics") run_asymptotics(config);
    else if (s == "rates") run_rates(config);
    else if (s == "figure") run_figure(config);
    else {
      bool pass = false;
      run_selftest(config, pass);
      return pass ? 0 : 1;
    }
    return 0;
  } catch (const Error& e) {
    err << dump(error_record(e)) << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    Json j;
    j["code"] = "cli.InternalError";
    j["message"] = e.what();
    j["exit"] = 1;
    err << dump(j) << '\n';
    return 1;
  }
}

}  // namespace tvflow
