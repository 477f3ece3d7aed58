#include "config.hpp"

#include "heatlab/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>

#include <charconv>
#include <fstream>
#include <cmath>
#include <sstream>

namespace heatlab::cli {

namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_number(const std::string& where, const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw ConfigError(where + ": '" + text + "' is not a finite number");
    }
    return v;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
    Config c;
    c.origin_ = origin;
    std::istringstream in(text);
    try {
        pt::read_ini(in, c.tree_);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    for (const auto& [name, node] : c.tree_) {
        if (node.empty()) throw ConfigError(origin + ": key '" + name + "' must live inside a [section]");
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

std::optional<std::string> Config::raw(const std::string& section, const std::string& key) const {
    const auto sec = tree_.get_child_optional(pt::ptree::path_type(section, '\0'));
    if (!sec) return std::nullopt;
    const auto val = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!val) return std::nullopt;
    used_.emplace(section, key);
    return trim(*val);
}

bool Config::has(const std::string& section, const std::string& key) const {
    const auto sec = tree_.get_child_optional(pt::ptree::path_type(section, '\0'));
    return sec && sec->get_child_optional(pt::ptree::path_type(key, '\0'));
}

std::string Config::text(const std::string& section, const std::string& key) const {
    auto v = raw(section, key);
    if (!v) throw ConfigError(origin_ + ": missing required key [" + section + "] " + key);
    return *v;
}

std::string Config::text(const std::string& section, const std::string& key, const std::string& fallback) const {
    return raw(section, key).value_or(fallback);
}

double Config::number(const std::string& section, const std::string& key) const {
    return parse_number("[" + section + "] " + key, text(section, key));
}

double Config::number(const std::string& section, const std::string& key, double fallback) const {
    auto v = raw(section, key);
    return v ? parse_number("[" + section + "] " + key, *v) : fallback;
}

int Config::integer(const std::string& section, const std::string& key, int fallback) const {
    const double v = number(section, key, fallback);
    if (v != std::floor(v) || std::abs(v) > 1e9) {
        throw ConfigError("[" + section + "] " + key + ": expected an integer");
    }
    return static_cast<int>(v);
}

std::uint64_t Config::unsigned64(const std::string& section, const std::string& key, std::uint64_t fallback) const {
    auto v = raw(section, key);
    if (!v) return fallback;
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || ptr != v->data() + v->size()) {
        throw ConfigError("[" + section + "] " + key + ": expected an unsigned integer");
    }
    return out;
}

bool Config::boolean(const std::string& section, const std::string& key, bool fallback) const {
    auto v = raw(section, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    throw ConfigError("[" + section + "] " + key + ": expected true or false");
}

std::vector<double> Config::numbers(const std::string& section, const std::string& key,
                                    std::vector<double> fallback) const {
    auto v = raw(section, key);
    if (!v) return fallback;
    std::vector<double> out;
    for (const auto& item : split_list(*v)) out.push_back(parse_number("[" + section + "] " + key, item));
    return out;
}

std::vector<std::string> Config::words(const std::string& section, const std::string& key,
                                       std::vector<std::string> fallback) const {
    auto v = raw(section, key);
    if (!v) return fallback;
    return split_list(*v);
}

void Config::require_all_used() const {
    for (const auto& [section, node] : tree_) {
        for (const auto& [key, value] : node) {
            if (!used_.count({section, key})) {
                throw ConfigError(origin_ + ": unknown key [" + section + "] " + key);
            }
        }
    }
}

nlohmann::ordered_json Config::echo() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [section, node] : tree_) {
        auto& s = j[section];
        s = nlohmann::ordered_json::object();
        for (const auto& [key, value] : node) s[key] = trim(value.data());
    }
    return j;
}

}  // namespace heatlab::cli
