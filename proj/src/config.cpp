#include "cavdet/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cavdet {

namespace {

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

double parse_double(const std::string& key, const std::string& text) {
    try {
        size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' has non-numeric value '" + text + "'");
    }
}

long parse_int(const std::string& key, const std::string& text) {
    long v = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw ConfigError("config: key '" + key + "' has non-integer value '" + text + "'");
    return v;
}

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    std::stringstream ss(text);
    while (std::getline(ss, cur, ',')) {
        cur = trim(cur);
        if (!cur.empty()) parts.push_back(cur);
    }
    return parts;
}

}  // namespace

ConfigMap ConfigMap::parse_string(const std::string& text) {
    ConfigMap cfg;
    std::stringstream ss(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("config: malformed section header at line " +
                                  std::to_string(lineno));
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw ConfigError("config: empty section name at line " + std::to_string(lineno));
            continue;
        }
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected 'key = value' at line " + std::to_string(lineno));
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config: empty key at line " + std::to_string(lineno));
        if (value.empty())
            throw ConfigError("config: key '" + key + "' has no value (line " +
                              std::to_string(lineno) + ")");
        cfg.set(section.empty() ? key : section + "." + key, value);
    }
    return cfg;
}

ConfigMap ConfigMap::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

const ConfigMap::Entry* ConfigMap::find(const std::string& key) const {
    for (const auto& e : entries_)
        if (e.key == key) return &e;
    return nullptr;
}

const ConfigMap::Entry& ConfigMap::require(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) throw ConfigError("config: missing required key '" + key + "'");
    e->consumed = true;
    return *e;
}

bool ConfigMap::has(const std::string& key) const { return find(key) != nullptr; }

std::string ConfigMap::get_string(const std::string& key) const { return require(key).value; }

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

double ConfigMap::get_double(const std::string& key) const {
    const Entry& e = require(key);
    return parse_double(key, e.value);
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long ConfigMap::get_int(const std::string& key) const {
    const Entry& e = require(key);
    return parse_int(key, e.value);
}

long ConfigMap::get_int(const std::string& key, long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

bool ConfigMap::get_bool(const std::string& key) const {
    std::string v = require(key).value;
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config: key '" + key + "' has non-boolean value '" + v + "'");
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
    return has(key) ? get_bool(key) : fallback;
}

std::vector<long> ConfigMap::get_int_list(const std::string& key) const {
    const Entry& e = require(key);
    std::vector<long> out;
    for (const std::string& item : split_csv(e.value)) {
        const size_t colon = item.find(':');
        if (colon == std::string::npos) {
            out.push_back(parse_int(key, item));
            continue;
        }
        const long lo = parse_int(key, trim(item.substr(0, colon)));
        const long hi = parse_int(key, trim(item.substr(colon + 1)));
        if (hi < lo)
            throw ConfigError("config: key '" + key + "' has descending range '" + item + "'");
        for (long v = lo; v <= hi; ++v) out.push_back(v);
    }
    if (out.empty()) throw ConfigError("config: key '" + key + "' has an empty list");
    return out;
}

std::vector<double> ConfigMap::get_double_list(const std::string& key) const {
    const Entry& e = require(key);
    std::vector<double> out;
    for (const std::string& item : split_csv(e.value)) out.push_back(parse_double(key, item));
    if (out.empty()) throw ConfigError("config: key '" + key + "' has an empty list");
    return out;
}

void ConfigMap::set(const std::string& key, const std::string& value) {
    if (key.empty()) throw ConfigError("config: empty key");
    if (find(key)) throw ConfigError("config: duplicate key '" + key + "'");
    entries_.push_back(Entry{key, value, false});
}

void ConfigMap::replace(const std::string& key, const std::string& value) {
    for (auto& e : entries_) {
        if (e.key == key) {
            e.value = value;
            e.consumed = false;
            return;
        }
    }
    set(key, value);
}

void ConfigMap::check_consumed() const {
    std::string leftovers;
    for (const auto& e : entries_)
        if (!e.consumed) leftovers += (leftovers.empty() ? "" : ", ") + e.key;
    if (!leftovers.empty())
        throw ConfigError("config: unrecognized key(s): " + leftovers);
}

std::vector<std::string> ConfigMap::keys() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.key);
    return out;
}

std::string ConfigMap::serialize() const {
    // group by section, keeping first-appearance order of sections and keys
    std::vector<std::string> sections;
    auto section_of = [](const std::string& key) {
        const size_t dot = key.find('.');
        return dot == std::string::npos ? std::string() : key.substr(0, dot);
    };
    for (const auto& e : entries_) {
        const std::string s = section_of(e.key);
        if (std::find(sections.begin(), sections.end(), s) == sections.end())
            sections.push_back(s);
    }
    // bare keys always lead, otherwise they would land in the last section
    std::stable_partition(sections.begin(), sections.end(),
                          [](const std::string& s) { return s.empty(); });
    std::string out;
    for (const auto& s : sections) {
        if (!s.empty()) out += "[" + s + "]\n";
        for (const auto& e : entries_) {
            if (section_of(e.key) != s) continue;
            const std::string name = s.empty() ? e.key : e.key.substr(s.size() + 1);
            out += name + " = " + e.value + "\n";
        }
    }
    return out;
}

}  // namespace cavdet
