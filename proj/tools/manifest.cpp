#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "musical/image.hpp"

namespace musical::cli {

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("missing file: " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 unavailable");
    std::array<char, 1 << 16> buf{};
    while (is) {
        is.read(buf.data(), buf.size());
        EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(is.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
    return os.str();
}

RunManifest::RunManifest(std::string subcommand, std::vector<std::string> argv)
    : subcommand_(std::move(subcommand)), argv_(std::move(argv)) {}

void RunManifest::add_input(const std::filesystem::path& path) {
    inputs_.emplace_back(path.string(), sha256_file(path));
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["tool"] = "musical";
    j["version"] = kToolVersion;
    j["subcommand"] = subcommand_;
    j["argv"] = argv_;
    j["config"] = config_;
    j["inputs"] = nlohmann::json::array();
    for (const auto& [p, h] : inputs_) j["inputs"].push_back({{"path", p}, {"sha256", h}});
    j["outputs"] = outputs_;
    j["seed"] = seed_ ? nlohmann::json(*seed_) : nlohmann::json(nullptr);
    j["timings_ms"] = nlohmann::json::object();
    for (const auto& [phase, ms] : timings_) j["timings_ms"][phase] = ms;
    return j;
}

void RunManifest::write_alongside_outputs() const {
    const std::string text = to_json().dump(2) + "\n";
    for (const auto& out : outputs_) {
        std::ofstream os(out + ".manifest.json");
        if (!os) throw Error("cannot write manifest for " + out);
        os << text;
    }
}

}  // namespace musical::cli
