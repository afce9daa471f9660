#pragma once

#include <filesystem>
#include <vector>

#include "musical/image.hpp"

namespace musical {

/// Reads a multi-page grayscale TIFF (8/16-bit unsigned or 32-bit float).
/// Integer samples are widened to double without rescaling.
ImageStack load_stack(const std::filesystem::path& path, const Calibration& calibration);

struct StackSummary {
    Image mean_image;
    double min = 0.0;
    double max = 0.0;
    std::vector<double> frame_means;
};

StackSummary stack_summary(const ImageStack& stack);

enum class SampleFormat { uint8, uint16, float32 };

/// Writes every frame as one page. Integer formats require integral values in range.
void write_stack(const std::filesystem::path& path, const ImageStack& stack, SampleFormat format);

/// Picks uint16 when every sample is an integer in [0, 65535], float32 otherwise.
SampleFormat smallest_exact_format(const ImageStack& stack);

/// Single-page image IO.
void write_tiff(const std::filesystem::path& path, const Image& image, SampleFormat format);
void write_png(const std::filesystem::path& path, const Image& image);  // values must already be 0..255
Image read_tiff_page(const std::filesystem::path& path);

}  // namespace musical
