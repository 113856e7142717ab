#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cavdet {

// 64-bit FNV-1a over the exact byte sequence
std::uint64_t fnv1a(std::string_view bytes);
std::string fnv1a_hex(std::string_view bytes);

// Numeric table tagged with the config hash that produced it. Layout:
//   # config_hash=<hex>
//   col_a,col_b,...
//   <values with 17 significant digits>
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows, const std::string& config_hash);

// Sidecar describing a run: scenario name, the exact (re-serialized) config
// with its hash, plus free-form numeric diagnostics and text notes. Written
// as JSON next to the data file.
struct RunMetadata {
    std::string scenario;
    std::string config_hash;
    std::string config_text;
    std::map<std::string, double> numbers;
    std::map<std::string, std::string> notes;
};

void write_metadata(const std::string& path, const RunMetadata& meta);

}  // namespace cavdet
