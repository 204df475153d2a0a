#include "hcs/config_reader.hpp"

#include <cmath>
#include <limits>

namespace hcs {

ConfigReader::ConfigReader(const Json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError((path_.empty() ? "config" : path_) + ": expected an object");
}

std::string ConfigReader::field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

void ConfigReader::fail(const std::string& key, const std::string& message) const {
    throw ConfigError(field(key) + ": " + message);
}

const Json* ConfigReader::find(const std::string& key) {
    seen_.insert(key);
    const auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
}

bool ConfigReader::has(const std::string& key) const { return node_.contains(key); }

const Json* ConfigReader::raw(const std::string& key) { return find(key); }

void ConfigReader::get(const std::string& key, double& out) {
    const Json* v = find(key);
    if (!v) return;
    if (!v->is_number()) fail(key, "expected a number");
    out = v->get<double>();
    if (!std::isfinite(out)) fail(key, "must be finite");
}

void ConfigReader::get(const std::string& key, int& out) {
    const Json* v = find(key);
    if (!v) return;
    if (!v->is_number_integer()) fail(key, "expected an integer");
    const auto value = v->get<std::int64_t>();
    if (value < std::numeric_limits<int>::min() || value > std::numeric_limits<int>::max())
        fail(key, "integer out of range");
    out = static_cast<int>(value);
}

void ConfigReader::get(const std::string& key, std::uint64_t& out) {
    const Json* v = find(key);
    if (!v) return;
    if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() && v->get<std::int64_t>() < 0))
        fail(key, "expected a non-negative integer");
    out = v->get<std::uint64_t>();
}

void ConfigReader::get(const std::string& key, bool& out) {
    const Json* v = find(key);
    if (!v) return;
    if (!v->is_boolean()) fail(key, "expected true or false");
    out = v->get<bool>();
}

void ConfigReader::get(const std::string& key, std::string& out) {
    const Json* v = find(key);
    if (!v) return;
    if (!v->is_string()) fail(key, "expected a string");
    out = v->get<std::string>();
}

void ConfigReader::get(const std::string& key, std::vector<double>& out) {
    const Json* v = find(key);
    if (!v) return;
    if (!v->is_array()) fail(key, "expected an array of numbers");
    std::vector<double> values;
    for (const auto& item : *v) {
        if (!item.is_number()) fail(key, "expected an array of numbers");
        values.push_back(item.get<double>());
    }
    out = std::move(values);
}

void ConfigReader::get(const std::string& key, std::vector<std::string>& out) {
    const Json* v = find(key);
    if (!v) return;
    if (!v->is_array()) fail(key, "expected an array of strings");
    std::vector<std::string> values;
    for (const auto& item : *v) {
        if (!item.is_string()) fail(key, "expected an array of strings");
        values.push_back(item.get<std::string>());
    }
    out = std::move(values);
}

ConfigReader ConfigReader::child(const std::string& key) {
    const Json* v = find(key);
    if (!v) return ConfigReader(Json::object(), field(key));
    if (!v->is_object()) fail(key, "expected an object");
    return ConfigReader(*v, field(key));
}

void ConfigReader::finish() const {
    std::string unknown;
    for (const auto& [key, value] : node_.items()) {
        if (seen_.contains(key)) continue;
        unknown += (unknown.empty() ? "" : ", ") + field(key);
    }
    if (!unknown.empty()) throw ConfigError("unknown config field(s): " + unknown);
}

void require_positive(const ConfigReader& r, const std::string& key, double value) {
    if (!(value > 0.0)) r.fail(key, "must be > 0");
}

void require_non_negative(const ConfigReader& r, const std::string& key, double value) {
    if (!(value >= 0.0)) r.fail(key, "must be >= 0");
}

void require_range(const ConfigReader& r, const std::string& key, double value, double lo, double hi) {
    if (!(value >= lo && value <= hi))
        r.fail(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

}  // namespace hcs
