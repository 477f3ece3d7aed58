#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace heatlab::cli {

inline constexpr int kSchemaVersion = 1;

struct Check {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string relation;  // e.g. "<=", ">=", "=="
    std::string detail;
};

struct RunReport {
    int schema_version = kSchemaVersion;
    std::string kind;
    nlohmann::ordered_json config;
    std::vector<Check> checks;
    nlohmann::ordered_json values = nlohmann::ordered_json::object();
    double wall_clock_seconds = 0.0;
    std::vector<std::string> artifacts;

    bool passed() const;
    /// Adds a check; throws if the name was already used.
    void add(Check c);
    void add(const std::string& name, double measured, const std::string& relation, double tolerance,
             std::string detail = {});

    nlohmann::ordered_json to_json() const;
    static RunReport from_json(const nlohmann::ordered_json& j);
};

}  // namespace heatlab::cli
