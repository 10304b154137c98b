#pragma once

#include "json.hpp"
#include "mfcn/harness.hpp"
#include "mfcn/network.hpp"
#include "mfcn/sphere.hpp"
#include "mfcn/spectral.hpp"

namespace mfcn {

using json = nlohmann::json;

// Filter JSON: {"kind":"heat"} | {"kind":"wavelet","j":2} |
// {"kind":"constant","c":0.5} | {"kind":"poly_in_heat","coeffs":[...]}
json filter_to_json(const SpectralFilter& w);
SpectralFilter filter_from_json(const json& j);

// Expansion JSON: [{"l":1,"m":0,"coeff":1.0}, ...]
json expansion_to_json(const sphere::HarmonicExpansion& f);
sphere::HarmonicExpansion expansion_from_json(const json& j);

// Network JSON: {"layers":[{"J","C_in","C_mid","J_out","filters":[...],
// "theta":[...],"alpha":[...],"activation"}],"preset"}.
// filters is a flat list of J*C_in entries ordered j-major (index j*C_in+k);
// theta is J matrices (C_in x C_mid) and alpha C_mid matrices (J_out x J),
// both as nested row-major arrays.
json network_to_json(const NetworkSpec& net);
NetworkSpec network_from_json(const json& j);

json experiment_config_to_json(const ExperimentConfig& cfg);
/// Validates the schema; ConfigError lists every offending key at once.
ExperimentConfig experiment_config_from_json(const json& j);

json parse_json_file(const std::string& path);

}  // namespace mfcn
