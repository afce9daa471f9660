#include "musical/stack_io.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "image_io_detail.hpp"

namespace musical {

void Calibration::validate() const {
    if (!(pixel_size_nm > 0.0)) throw Error("pixel size must be positive");
    if (!(wavelength_nm > 0.0)) throw Error("wavelength must be positive");
    if (!(numerical_aperture > 0.0)) throw Error("numerical aperture must be positive");
    if (exposure_ms < 0.0) throw Error("exposure must be non-negative");
}

ImageStack::ImageStack(int frames, int height, int width, std::vector<double> samples, Calibration calibration)
    : frames_(frames), height_(height), width_(width), samples_(std::move(samples)), calibration_(calibration) {
    if (frames_ < 2) throw Error("fewer than 2 frames");
    if (height_ <= 0 || width_ <= 0) throw Error("empty frame dimensions");
    if (samples_.size() != static_cast<std::size_t>(frames_) * pixels())
        throw Error("sample count does not match frames x height x width");
    for (double v : samples_) {
        if (!std::isfinite(v)) throw Error("non-finite intensity");
        if (v < 0.0) throw Error("negative intensity");
    }
    calibration_.validate();
}

ImageStack ImageStack::scaled(double factor) const {
    if (!(factor > 0.0)) throw Error("scale factor must be positive");
    std::vector<double> out(samples_.size());
    std::transform(samples_.begin(), samples_.end(), out.begin(), [factor](double v) { return v * factor; });
    return ImageStack(frames_, height_, width_, std::move(out), calibration_);
}

ImageStack load_stack(const std::filesystem::path& path, const Calibration& calibration) {
    calibration.validate();
    auto pages = detail::read_tiff_pages(path);
    if (pages.size() < 2) throw Error("fewer than 2 frames");
    const int h = pages.front().image.rows;
    const int w = pages.front().image.cols;
    std::vector<double> samples;
    samples.reserve(pages.size() * static_cast<std::size_t>(h) * static_cast<std::size_t>(w));
    for (std::size_t i = 0; i < pages.size(); ++i) {
        const Image& img = pages[i].image;
        if (img.rows != h || img.cols != w)
            throw Error("inconsistent page dimensions: page " + std::to_string(i) + " is " +
                        std::to_string(img.rows) + "x" + std::to_string(img.cols) + ", expected " +
                        std::to_string(h) + "x" + std::to_string(w));
        samples.insert(samples.end(), img.data.begin(), img.data.end());
    }
    return ImageStack(static_cast<int>(pages.size()), h, w, std::move(samples), calibration);
}

StackSummary stack_summary(const ImageStack& stack) {
    StackSummary s;
    s.mean_image = Image(stack.height(), stack.width());
    s.frame_means.reserve(static_cast<std::size_t>(stack.frames()));
    const auto all = stack.samples();
    s.min = *std::min_element(all.begin(), all.end());
    s.max = *std::max_element(all.begin(), all.end());

    for (int t = 0; t < stack.frames(); ++t) {
        const auto f = stack.frame(t);
        double frame_sum = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k) {
            s.mean_image.data[k] += f[k];
            frame_sum += f[k];
        }
        s.frame_means.push_back(frame_sum / static_cast<double>(f.size()));
    }
    const double inv_t = 1.0 / stack.frames();
    for (double& v : s.mean_image.data) v *= inv_t;
    return s;
}

SampleFormat smallest_exact_format(const ImageStack& stack) {
    for (double v : stack.samples())
        if (v > 65535.0 || v != std::floor(v)) return SampleFormat::float32;
    return SampleFormat::uint16;
}

void write_stack(const std::filesystem::path& path, const ImageStack& stack, SampleFormat format) {
    std::vector<Image> pages;
    pages.reserve(static_cast<std::size_t>(stack.frames()));
    for (int t = 0; t < stack.frames(); ++t) {
        Image img(stack.height(), stack.width());
        const auto f = stack.frame(t);
        std::copy(f.begin(), f.end(), img.data.begin());
        pages.push_back(std::move(img));
    }
    detail::write_tiff_pages(path, pages, format);
}

void write_tiff(const std::filesystem::path& path, const Image& image, SampleFormat format) {
    detail::write_tiff_pages(path, std::span<const Image>(&image, 1), format);
}

void write_png(const std::filesystem::path& path, const Image& image) { detail::write_png_gray8(path, image); }

Image read_tiff_page(const std::filesystem::path& path) {
    auto pages = detail::read_tiff_pages(path);
    return std::move(pages.front().image);
}

}  // namespace musical
