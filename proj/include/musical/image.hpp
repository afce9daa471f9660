#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace musical {

/// Library-wide error type. Messages are meant to be shown to a user as-is.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Row-major 2D grid of reals.
struct Image {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Image() = default;
    Image(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
    std::size_t size() const { return data.size(); }
};

struct Calibration {
    double pixel_size_nm = 80.0;
    double wavelength_nm = 665.0;
    double numerical_aperture = 1.42;
    double exposure_ms = 0.0;  // optional, 0 when unknown

    void validate() const;
};

/// T frames of H x W nonnegative intensities (photo-electron counts).
/// Immutable once constructed; construction validates every invariant.
class ImageStack {
public:
    ImageStack(int frames, int height, int width, std::vector<double> samples, Calibration calibration);

    int frames() const { return frames_; }
    int height() const { return height_; }
    int width() const { return width_; }
    const Calibration& calibration() const { return calibration_; }

    std::span<const double> frame(int t) const {
        return {samples_.data() + static_cast<std::size_t>(t) * pixels(), pixels()};
    }
    double at(int t, int r, int c) const {
        return samples_[static_cast<std::size_t>(t) * pixels() + static_cast<std::size_t>(r) * width_ + c];
    }
    std::span<const double> samples() const { return samples_; }
    std::size_t pixels() const { return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_); }

    /// Same frames multiplied by a positive constant.
    ImageStack scaled(double factor) const;

private:
    int frames_;
    int height_;
    int width_;
    std::vector<double> samples_;
    Calibration calibration_;
};

}  // namespace musical
