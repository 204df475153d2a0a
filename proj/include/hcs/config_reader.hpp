#pragma once
// Strict reading of JSON config sections: unknown keys and wrong types are
// rejected with the dotted path of the offending field.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "hcs/errors.hpp"

namespace hcs {

using Json = nlohmann::json;

class ConfigReader {
public:
    ConfigReader(const Json& node, std::string path);

    /// Each getter leaves `out` untouched when the key is absent.
    void get(const std::string& key, double& out);
    void get(const std::string& key, int& out);
    void get(const std::string& key, std::uint64_t& out);
    void get(const std::string& key, bool& out);
    void get(const std::string& key, std::string& out);
    void get(const std::string& key, std::vector<double>& out);
    void get(const std::string& key, std::vector<std::string>& out);

    [[nodiscard]] bool has(const std::string& key) const;
    /// Nested object reader; the key must hold an object when present.
    [[nodiscard]] ConfigReader child(const std::string& key);
    /// Raw access for custom shapes; marks the key as known.
    [[nodiscard]] const Json* raw(const std::string& key);
    [[nodiscard]] std::string field(const std::string& key) const;

    /// Throws ConfigError naming every key that no getter asked for.
    void finish() const;

    /// Throws ConfigError("<path>.<key>: <message>").
    [[noreturn]] void fail(const std::string& key, const std::string& message) const;

private:
    const Json* find(const std::string& key);
    Json node_;
    std::string path_;
    std::set<std::string> seen_;
};

/// Positive / non-negative / range checks that raise field-level ConfigErrors.
void require_positive(const ConfigReader& r, const std::string& key, double value);
void require_non_negative(const ConfigReader& r, const std::string& key, double value);
void require_range(const ConfigReader& r, const std::string& key, double value, double lo, double hi);

}  // namespace hcs
