#pragma once

// Flat `key = value` run configuration ('#' starts a comment). Defaults are
// the reference experiment: true model (0.25, 1, 0.1, 1, 0.1), lambda 0.5,
// T = 100, N = 5000, M = 500.

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "srl/closed_form.hpp"
#include "srl/trainer.hpp"

namespace srl {

struct RunConfig {
    ModelParams model;
    TrainConfig train;

    bool operator==(const RunConfig&) const = default;
};

/// Raised for malformed or inconsistent configuration input.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Keys recognised by parse_config, in serialization order.
const std::vector<std::string>& config_keys();

/// Applies `key = value` lines on top of the defaults. `source` names the
/// input in diagnostics. Throws ConfigError.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Sets one key; throws ConfigError on an unknown key or bad value.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Every key, one per line, reals with 17 significant digits.
std::string serialize_config(const RunConfig& cfg);

/// Checks model and training invariants; throws ConfigError.
void validate(const RunConfig& cfg);

} // namespace srl
