#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace fracprice {

inline constexpr const char* kLibraryVersion = "1.0.0";

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);
std::string sha256_hex(const std::string& bytes);

/// Record of one CLI run: command, flag snapshot, seed and a checksum per output file.
/// Serialisation is deterministic: no timestamps, keys in insertion order.
struct RunManifest {
    struct Output {
        std::string name;
        std::string sha256;
        std::uintmax_t bytes = 0;
    };

    std::string command;
    std::vector<std::pair<std::string, std::string>> config;
    std::uint64_t seed = 0;
    std::string version = kLibraryVersion;
    std::vector<Output> outputs;

    /// Hash path and list it under its file name.
    void add_output(const std::string& path);
    std::string to_json() const;
    void write(const std::string& path) const;
};

}  // namespace fracprice
