#include "fracprice/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>

#include <openssl/evp.h>

#include "json.hpp"

#include "fracprice/error.hpp"

namespace fracprice {

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorCode::Io, "sha256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 15]);
    }
    return out;
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return sha256_hex(bytes);
}

void RunManifest::add_output(const std::string& path) {
    Output o;
    o.name = std::filesystem::path(path).filename().string();
    o.sha256 = sha256_file(path);
    o.bytes = std::filesystem::file_size(path);
    outputs.push_back(o);
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config) cfg[k] = v;
    j["config"] = cfg;
    j["seed"] = seed;
    j["version"] = version;
    nlohmann::ordered_json outs = nlohmann::ordered_json::array();
    for (const auto& o : outputs) outs.push_back({{"name", o.name}, {"sha256", o.sha256}, {"bytes", o.bytes}});
    j["outputs"] = outs;
    return j.dump(2) + "\n";
}

void RunManifest::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
    out << to_json();
}

}  // namespace fracprice
