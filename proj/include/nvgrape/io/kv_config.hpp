#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace nvgrape::io {

// Flat `key = value` configuration. Blank lines and text after '#' are
// ignored. Later assignments override earlier ones, so command-line
// overrides are applied with set().
class KvConfig {
public:
    static KvConfig load(const std::string& path);
    static KvConfig parse(std::istream& in, const std::string& source = "<stream>");

    void set(const std::string& key, const std::string& value);
    // Parses "key=value"; throws ConfigError otherwise.
    void set_assignment(const std::string& assignment);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    // Comma-separated numbers.
    std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

    // Throws ConfigError naming any key outside the allowed set.
    void require_known(const std::set<std::string>& allowed) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

} // namespace nvgrape::io
