#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "musical/image.hpp"
#include "musical/stack_io.hpp"

namespace musical::detail {

struct Page {
    Image image;
};

std::vector<Page> read_tiff_pages(const std::filesystem::path& path);
void write_tiff_pages(const std::filesystem::path& path, std::span<const Image> pages, SampleFormat format);
void write_png_gray8(const std::filesystem::path& path, const Image& image);

}  // namespace musical::detail
