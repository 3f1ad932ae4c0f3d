#pragma once

#include <string>

#include "json.hpp"

#include "crowdsense/core_model.hpp"
#include "crowdsense/hard_chance.hpp"
#include "crowdsense/sim_harness.hpp"
#include "crowdsense/soft_chance.hpp"

namespace crowdsense {

using Json = nlohmann::ordered_json;

/// Reads and parses a JSON file; ConfigError on I/O or syntax errors.
Json read_json_file(const std::string& path);

/// Scenario from {T, L, requirement, curves, spec}. Errors are ConfigError
/// messages prefixed with the offending field path.
Scenario parse_scenario(const Json& j);

/// Overrides `defaults` with the keys of an optional "search" object.
BinarySearchParams parse_search_params(const Json& j, BinarySearchParams defaults);

/// Experiment settings; every key is optional and has a built-in default.
ExperimentConfig parse_experiment(const Json& j);

Json to_json(const PolicyMatrix& policy);
Json to_json(const Matrix<double>& m);
Json to_json(const GapCertificate& certificate);
Json to_json(const LocationSearch& search, bool with_trajectory);

}  // namespace crowdsense
