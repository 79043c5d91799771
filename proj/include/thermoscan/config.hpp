#pragma once

#include <map>
#include <string>

#include "thermoscan/training.hpp"

namespace thermoscan {

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Every tunable default of the pipeline. Detection knobs live in training.detector; `mode`
/// there is chosen per command, not by the config file.
struct Config {
    TrainingOptions training;

    const DetectMode& detector() const { return training.detector; }
};

/// Applies key=value lines onto `base`. '#' starts a comment; blank lines are skipped.
/// Unknown keys, duplicates and out-of-range values throw ConfigError naming `source` and the line.
Config parseConfig(const std::string& text, const std::string& source = "<config>", Config base = {});
Config readConfigFile(const std::string& path);

/// One value, same validation as the file parser. Used for command-line overrides.
void setConfigValue(Config& config, const std::string& key, const std::string& value);

/// The defaults rendered as a config file; parsing it yields the defaults back.
std::string formatConfig(const Config& config);

inline constexpr const char* kConfigEnvVar = "THERMOSCAN_CONFIG";

}  // namespace thermoscan
