#pragma once

#include <string>
#include <vector>

#include "cavdet/types.hpp"

namespace cavdet {

// Minimal typed key-value configuration. Files look like
//
//   # comment
//   seed = 7
//   [cavity]
//   length = 6.2831853
//   boundary = dirichlet
//
// Keys are addressed as "section.key" ("seed" above has no section). Every
// getter records the key as consumed; check_consumed() then rejects any
// leftover key, so a typo in a config file fails loudly instead of being
// silently ignored. serialize() reproduces an equivalent file (comments are
// not kept), grouping keys by section in first-appearance order.
class ConfigMap {
public:
    ConfigMap() = default;

    static ConfigMap parse_file(const std::string& path);
    static ConfigMap parse_string(const std::string& text);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key) const;
    long get_int(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key) const;
    bool get_bool(const std::string& key, bool fallback) const;
    // comma-separated; integer items may be "a:b" inclusive ranges
    std::vector<long> get_int_list(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key) const;

    void set(const std::string& key, const std::string& value);
    // like set, but an existing key is overwritten (command-line overrides)
    void replace(const std::string& key, const std::string& value);

    // throws ConfigError naming every key no getter ever touched
    void check_consumed() const;

    std::string serialize() const;
    std::vector<std::string> keys() const;

private:
    struct Entry {
        std::string key;    // full "section.name" path
        std::string value;
        mutable bool consumed = false;
    };
    const Entry* find(const std::string& key) const;
    const Entry& require(const std::string& key) const;
    std::vector<Entry> entries_;  // insertion order
};

}  // namespace cavdet
