#pragma once

#include <map>
#include <string>
#include <vector>

namespace msf {

// Minimal INI-style config: [section] headers, key = value pairs, '#' or ';'
// comments. Keys are addressed as "section.key" ("" section for top-level
// keys). Parse problems are collected, not thrown, so validators can report
// every issue at once.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long get_long(const std::string& key) const;
    long get_long(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    void set(const std::string& key, const std::string& value);

    const std::vector<std::string>& errors() const { return errors_; }
    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
    std::vector<std::string> errors_;
};

}  // namespace msf
