#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "musical/image.hpp"

namespace fixture {

/// Scratch directory for a test; wiped on creation.
inline std::filesystem::path scratch(const std::string& name) {
    const char* root = std::getenv("MUSICAL_TEST_TMP");
    std::filesystem::path dir =
        std::filesystem::path(root ? root : std::filesystem::temp_directory_path().string()) / ("musical_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline musical::ImageStack random_stack(int frames, int height, int width, std::uint64_t seed, double scale = 100.0,
                                        bool integral = false) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, scale);
    std::vector<double> v(static_cast<std::size_t>(frames) * height * width);
    for (double& x : v) x = integral ? std::floor(u(rng)) : u(rng);
    return musical::ImageStack(frames, height, width, std::move(v), musical::Calibration{});
}

}  // namespace fixture
