#include "report.hpp"

#include "heatlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace heatlab::cli {

namespace {

nlohmann::ordered_json number_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

}  // namespace

bool RunReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

void RunReport::add(Check c) {
    for (const auto& existing : checks) {
        if (existing.name == c.name) throw std::logic_error("duplicate check '" + c.name + "'");
    }
    checks.push_back(std::move(c));
}

void RunReport::add(const std::string& name, double measured, const std::string& relation, double tolerance,
                    std::string detail) {
    bool ok = false;
    if (relation == "<=") ok = measured <= tolerance;
    else if (relation == ">=") ok = measured >= tolerance;
    else if (relation == "==") ok = measured == tolerance;
    else if (relation == "<") ok = measured < tolerance;
    else throw std::logic_error("unknown relation '" + relation + "'");
    add(Check{name, ok, measured, tolerance, relation, std::move(detail)});
}

nlohmann::ordered_json RunReport::to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = schema_version;
    j["kind"] = kind;
    j["passed"] = passed();
    j["config"] = config;
    auto& cs = j["checks"];
    cs = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json e;
        e["name"] = c.name;
        e["passed"] = c.passed;
        e["measured"] = number_or_null(c.measured);
        e["relation"] = c.relation;
        e["tolerance"] = number_or_null(c.tolerance);
        if (!c.detail.empty()) e["detail"] = c.detail;
        cs.push_back(std::move(e));
    }
    j["values"] = values;
    j["wall_clock_seconds"] = wall_clock_seconds;
    j["artifacts"] = artifacts;
    return j;
}

RunReport RunReport::from_json(const nlohmann::ordered_json& j) {
    RunReport r;
    try {
        r.schema_version = j.at("schema_version").get<int>();
        r.kind = j.at("kind").get<std::string>();
        r.config = j.value("config", nlohmann::ordered_json::object());
        for (const auto& e : j.at("checks")) {
            Check c;
            c.name = e.at("name").get<std::string>();
            c.passed = e.at("passed").get<bool>();
            c.measured = e.at("measured").is_null() ? NAN : e.at("measured").get<double>();
            c.tolerance = e.at("tolerance").is_null() ? NAN : e.at("tolerance").get<double>();
            c.relation = e.value("relation", "");
            c.detail = e.value("detail", "");
            r.checks.push_back(std::move(c));
        }
        r.values = j.value("values", nlohmann::ordered_json::object());
        r.wall_clock_seconds = j.value("wall_clock_seconds", 0.0);
        r.artifacts = j.value("artifacts", std::vector<std::string>{});
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed report: ") + e.what());
    }
    return r;
}

}  // namespace heatlab::cli
