#pragma once

#include <boost/property_tree/ptree.hpp>

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace heatlab::cli {

/// Sectioned key = value experiment file. Every key must be read by the
/// experiment that owns the file; `require_all_used` reports leftovers.
class Config {
public:
    static Config load(const std::string& path);
    static Config parse(const std::string& text, const std::string& origin = "<string>");

    const std::string& origin() const noexcept { return origin_; }

    bool has(const std::string& section, const std::string& key) const;

    std::string text(const std::string& section, const std::string& key) const;
    std::string text(const std::string& section, const std::string& key, const std::string& fallback) const;
    double number(const std::string& section, const std::string& key) const;
    double number(const std::string& section, const std::string& key, double fallback) const;
    int integer(const std::string& section, const std::string& key, int fallback) const;
    std::uint64_t unsigned64(const std::string& section, const std::string& key, std::uint64_t fallback) const;
    bool boolean(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<double> numbers(const std::string& section, const std::string& key,
                                std::vector<double> fallback) const;
    std::vector<std::string> words(const std::string& section, const std::string& key,
                                   std::vector<std::string> fallback) const;

    /// ConfigError naming the first key no experiment asked for.
    void require_all_used() const;

    /// Section -> key -> raw text.
    nlohmann::ordered_json echo() const;

private:
    std::optional<std::string> raw(const std::string& section, const std::string& key) const;

    boost::property_tree::ptree tree_;
    std::string origin_;
    mutable std::set<std::pair<std::string, std::string>> used_;
};

}  // namespace heatlab::cli
