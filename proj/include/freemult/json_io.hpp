#pragma once

// JSON forms of measures, Levy pairs and fit results.
//
//   measure:    {"family": "pareto", "params": {"alpha": 0.5}}
//               families: atoms {locations, weights}, density_grid {nodes,
//               values, tail_kind: "power"|"exponential", tail_rate},
//               pareto {alpha}, point_mass {a}, free_poisson {},
//               mu_alpha_beta {alpha, beta}, sigma_min {c, d, alpha},
//               symmetric {inner}, pushforward {inner, power}
//   levy pair:  {"gamma": 0, "sigma": <measure>|null, "atoms": {"zero": 0, "inf": 0}}
//
// Malformed input raises Error(InvalidArgument).

#include <json.hpp>

#include <string>

#include "freemult/id_laws.hpp"
#include "freemult/measure.hpp"
#include "freemult/regvar.hpp"

namespace freemult {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "freemult/1";

MeasureSpec measure_from_json(const Json& j);
Json to_json(const MeasureSpec& mu);

LevyPair levy_pair_from_json(const Json& j);
Json to_json(const LevyPair& pair);

LogPowerSV sv_from_json(const Json& j);
Json to_json(const LogPowerSV& sv);
Json to_json(const TailAsymptotic& tail);
Json to_json(const RegVarFit& fit);
Json to_json(const TailEstimate& est);

/// Parses text or, when `text` names an existing file, that file's contents.
Json parse_json_arg(const std::string& text);

}  // namespace freemult
