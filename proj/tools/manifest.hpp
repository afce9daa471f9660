#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace musical::cli {

inline constexpr const char* kToolVersion = "0.1.0";

std::string sha256_file(const std::filesystem::path& path);

/// Everything needed to reproduce one CLI run: the argument vector, the resolved
/// configuration, input digests, the seed, and per-phase wall-clock timings.
class RunManifest {
public:
    RunManifest(std::string subcommand, std::vector<std::string> argv);

    void set_config(const std::string& key, nlohmann::json value) { config_[key] = std::move(value); }
    void add_input(const std::filesystem::path& path);
    void add_output(const std::filesystem::path& path) { outputs_.push_back(path.string()); }
    void set_seed(std::uint64_t seed) { seed_ = seed; }

    /// Runs fn, recording its duration under `phase`.
    template <typename F>
    decltype(auto) timed(const std::string& phase, F&& fn) {
        const auto start = std::chrono::steady_clock::now();
        struct Record {
            RunManifest* self;
            std::string phase;
            std::chrono::steady_clock::time_point start;
            ~Record() {
                const std::chrono::duration<double, std::milli> d = std::chrono::steady_clock::now() - start;
                self->timings_.emplace_back(phase, d.count());
            }
        } record{this, phase, start};
        return fn();
    }

    nlohmann::json to_json() const;

    /// Writes `<output>.manifest.json` next to every recorded output.
    void write_alongside_outputs() const;

private:
    std::string subcommand_;
    std::vector<std::string> argv_;
    nlohmann::json config_ = nlohmann::json::object();
    std::vector<std::pair<std::string, std::string>> inputs_;
    std::vector<std::string> outputs_;
    std::vector<std::pair<std::string, double>> timings_;
    std::optional<std::uint64_t> seed_;
};

}  // namespace musical::cli
