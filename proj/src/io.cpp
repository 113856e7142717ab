#include "cavdet/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace cavdet {

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string fnv1a_hex(std::string_view bytes) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(bytes)));
    return std::string(buf);
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows, const std::string& config_hash) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open '" + path + "'");
    out << "# config_hash=" << config_hash << "\n";
    for (size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << "\n";
    char buf[40];
    for (const auto& row : rows) {
        if (row.size() != columns.size())
            throw std::runtime_error("write_csv: row width does not match the header");
        for (size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
            out << (i ? "," : "") << buf;
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("write_csv: write failed for '" + path + "'");
}

void write_metadata(const std::string& path, const RunMetadata& meta) {
    nlohmann::json j;
    j["scenario"] = meta.scenario;
    j["config_hash"] = meta.config_hash;
    j["config_text"] = meta.config_text;
    j["numbers"] = meta.numbers;
    j["notes"] = meta.notes;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_metadata: cannot open '" + path + "'");
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("write_metadata: write failed for '" + path + "'");
}

}  // namespace cavdet
