#include "tvflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tvflow/error.hpp"

namespace tvflow {

Json number_to_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  fail(ErrorCode::ParseError, "expected a number, got " + j.dump());
}

namespace {

Json numbers(std::span<const double> xs) {
  Json arr = Json::array();
  for (double x : xs) arr.push_back(number_to_json(x));
  return arr;
}

std::vector<double> number_array(const Json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorCode::ParseError, std::string("missing field '") + key + "'");
  const Json& arr = j.at(key);
  if (!arr.is_array()) fail(ErrorCode::ParseError, std::string("field '") + key + "' is not an array");
  std::vector<double> out;
  out.reserve(arr.size());
  for (const Json& x : arr) out.push_back(number_from_json(x));
  return out;
}

void require_object(const Json& j, const char* what) {
  if (!j.is_object()) fail(ErrorCode::ParseError, std::string(what) + " must be a JSON object");
}

BoundaryMode parse_mode(const Json& j) {
  if (!j.is_string()) fail(ErrorCode::ParseError, "field 'mode' must be a string");
  const auto& s = j.get_ref<const std::string&>();
  if (s == "cauchy") return BoundaryMode::Cauchy;
  if (s == "neumann") return BoundaryMode::Neumann;
  fail(ErrorCode::ParseError, "unknown mode '" + s + "'");
}

void write_number(std::string& out, double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

void write(std::string& out, const Json& j) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, val] : j.items()) {
        if (!first) out += ',';
        first = false;
        out += Json(key).dump();
        out += ':';
        write(out, val);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      bool first = true;
      for (const Json& val : j) {
        if (!first) out += ',';
        first = false;
        write(out, val);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float:
      write_number(out, j.get<double>());
      break;
    default:
      out += j.dump();
  }
}

}  // namespace

Json to_json(const StepFunction& u) {
  Json j;
  j["mode"] = to_string(u.mode());
  if (u.mode() == BoundaryMode::Neumann) j["domain"] = {u.domain().lo, u.domain().hi};
  j["breakpoints"] = numbers(u.breakpoints());
  j["values"] = numbers(u.values());
  return j;
}

Json to_json(const PiecewiseLinear& p) {
  Json j;
  j["knots"] = numbers(p.knots());
  j["values"] = numbers(p.values());
  return j;
}

Json to_json(const DeltaMeasure& v) {
  Json arr = Json::array();
  for (const Atom& at : v.atoms()) arr.push_back({at.x, at.a});
  Json j;
  j["atoms"] = std::move(arr);
  return j;
}

StepFunction step_function_from_json(const Json& j, std::optional<BoundaryMode> fallback) {
  require_object(j, "step function");
  BoundaryMode mode = fallback.value_or(BoundaryMode::Cauchy);
  if (j.contains("mode")) {
    const BoundaryMode given = parse_mode(j.at("mode"));
    if (fallback && *fallback != given)
      fail(ErrorCode::ConfigError, "boundary mode in the file disagrees with the requested one");
    mode = given;
  }
  auto bps = number_array(j, "breakpoints");
  auto vals = number_array(j, "values");
  if (mode == BoundaryMode::Cauchy) return StepFunction::cauchy(std::move(bps), std::move(vals));
  if (!j.contains("domain")) fail(ErrorCode::ParseError, "neumann data need a 'domain'");
  const auto dom = number_array(j, "domain");
  if (dom.size() != 2) fail(ErrorCode::ParseError, "'domain' must have two entries");
  return StepFunction::neumann({dom[0], dom[1]}, std::move(bps), std::move(vals));
}

PiecewiseLinear profile_from_json(const Json& j) {
  require_object(j, "profile");
  return PiecewiseLinear(number_array(j, "knots"), number_array(j, "values"));
}

DeltaMeasure deltas_from_json(const Json& j) {
  require_object(j, "delta measure");
  if (!j.contains("atoms") || !j.at("atoms").is_array())
    fail(ErrorCode::ParseError, "missing array field 'atoms'");
  std::vector<Atom> atoms;
  for (const Json& pair : j.at("atoms")) {
    if (!pair.is_array() || pair.size() != 2)
      fail(ErrorCode::ParseError, "each atom must be a pair [x, a]");
    atoms.push_back({number_from_json(pair[0]), number_from_json(pair[1])});
  }
  return DeltaMeasure(std::move(atoms));
}

std::string dump(const Json& j) {
  std::string out;
  write(out, j);
  return out;
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::ParseError, e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

}  // namespace tvflow
