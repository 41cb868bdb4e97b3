#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "tvflow/profiles.hpp"
#include "tvflow/sfde.hpp"
#include "tvflow/stepfn.hpp"

namespace tvflow {

using Json = nlohmann::ordered_json;

/// {"mode", "domain" (neumann only), "breakpoints", "values"}.
Json to_json(const StepFunction& u);
/// {"knots", "values"}.
Json to_json(const PiecewiseLinear& p);
/// {"atoms": [[x, a], ...]}.
Json to_json(const DeltaMeasure& v);

/// Throws ParseError on schema violations. When "mode" is absent the
/// fallback is used; a present mode that disagrees with a fallback is a
/// ConfigError.
StepFunction step_function_from_json(const Json& j,
                                     std::optional<BoundaryMode> fallback = std::nullopt);
PiecewiseLinear profile_from_json(const Json& j);
DeltaMeasure deltas_from_json(const Json& j);

/// Number field that also accepts "inf" / "-inf" strings.
double number_from_json(const Json& j);
/// Finite numbers as %.17g, non-finite ones as "inf" / "-inf" / "nan".
Json number_to_json(double x);

/// Compact serialization with every double printed as %.17g and keys in
/// insertion order.
std::string dump(const Json& j);

Json parse_json(const std::string& text);
/// Throws IoError if the file cannot be read, ParseError if it is not JSON.
Json read_json_file(const std::string& path);

}  // namespace tvflow
