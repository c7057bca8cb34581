#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "frontlab/models.hpp"
#include "json.hpp"

namespace frontlab {

enum class ValueType { Real, Int, Bool, String, RealList };

struct KeySpec {
    std::string section;
    std::string key;
    ValueType type;
    std::string fallback;  ///< default in canonical form; empty string means unset
    std::string help;
};

/// Every accepted (section, key); the "params" section is free-form and checked against the model.
const std::vector<KeySpec>& config_schema();

/// Sectioned run configuration. Values are stored canonically, so serialization round-trips exactly.
class RunConfig {
public:
    /// Validates the key and value type; throws ConfigError.
    void set(const std::string& section, const std::string& key, const std::string& value);
    void set_param(const std::string& name, double value);
    void unset(const std::string& section, const std::string& key);

    bool has(const std::string& section, const std::string& key) const;
    double real(const std::string& section, const std::string& key) const;
    int integer(const std::string& section, const std::string& key) const;
    bool boolean(const std::string& section, const std::string& key) const;
    std::string str(const std::string& section, const std::string& key) const;
    std::vector<double> reals(const std::string& section, const std::string& key) const;

    const ParamMap& params() const { return params_; }

    /// Explicit values only; `resolved` also fills schema defaults.
    nlohmann::json to_json(bool resolved = false) const;
    std::string to_text() const;
    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig from_text(const std::string& text);
    /// JSON when the first non-blank character is '{', sectioned key/value otherwise.
    static RunConfig load(const std::filesystem::path& path);

    /// Parameters checked against the registered model's defaults.
    void validate() const;

    bool operator==(const RunConfig& o) const { return values_ == o.values_ && params_ == o.params_; }

private:
    std::map<std::string, std::map<std::string, std::string>> values_;
    ParamMap params_;
};

/// Model selected by the config: registry entry with parameter overrides, or a user symbol.
ModelSpec resolve_model(const RunConfig& cfg);

/// Matrices separated by '|', rows by ';', entries by ',' (e.g. "0|0|1" or "1,0;0,1").
std::vector<Mat> parse_matrices(const std::string& text);

/// Shortest round-trip decimal representation.
std::string format_real(double v);

}  // namespace frontlab
