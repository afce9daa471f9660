#include <tiffio.h>
#include <png.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <vector>

#include "image_io_detail.hpp"

namespace musical::detail {

namespace {

struct TiffCloser {
    void operator()(TIFF* tif) const { TIFFClose(tif); }
};
using TiffHandle = std::unique_ptr<TIFF, TiffCloser>;

void silence_libtiff() {
    static const bool once = [] {
        TIFFSetWarningHandler(nullptr);
        TIFFSetErrorHandler(nullptr);
        return true;
    }();
    (void)once;
}

template <typename T>
void convert_row(const unsigned char* buf, int width, double* out) {
    const T* typed = reinterpret_cast<const T*>(buf);
    for (int c = 0; c < width; ++c) out[c] = static_cast<double>(typed[c]);
}

}  // namespace

std::vector<Page> read_tiff_pages(const std::filesystem::path& path) {
    silence_libtiff();
    if (!std::filesystem::exists(path)) throw Error("missing file: " + path.string());
    TiffHandle tif(TIFFOpen(path.c_str(), "r"));
    if (!tif) throw Error("cannot open TIFF: " + path.string());

    std::vector<Page> pages;
    do {
        uint32_t width = 0, height = 0;
        uint16_t spp = 1, bps = 0, fmt = SAMPLEFORMAT_UINT, photometric = PHOTOMETRIC_MINISBLACK;
        TIFFGetField(tif.get(), TIFFTAG_IMAGEWIDTH, &width);
        TIFFGetField(tif.get(), TIFFTAG_IMAGELENGTH, &height);
        TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLESPERPIXEL, &spp);
        TIFFGetFieldDefaulted(tif.get(), TIFFTAG_BITSPERSAMPLE, &bps);
        TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLEFORMAT, &fmt);
        TIFFGetField(tif.get(), TIFFTAG_PHOTOMETRIC, &photometric);

        if (spp != 1 || photometric == PHOTOMETRIC_RGB || photometric == PHOTOMETRIC_PALETTE)
            throw Error("non-grayscale data in " + path.string());
        const bool is_uint = fmt == SAMPLEFORMAT_UINT && (bps == 8 || bps == 16);
        const bool is_float = fmt == SAMPLEFORMAT_IEEEFP && bps == 32;
        if (!is_uint && !is_float)
            throw Error("unsupported sample type (" + std::to_string(bps) + "-bit) in " + path.string());
        if (width == 0 || height == 0) throw Error("empty page in " + path.string());

        Page page{Image(static_cast<int>(height), static_cast<int>(width))};
        std::vector<unsigned char> buf(static_cast<std::size_t>(TIFFScanlineSize(tif.get())));
        for (uint32_t r = 0; r < height; ++r) {
            if (TIFFReadScanline(tif.get(), buf.data(), r, 0) < 0)
                throw Error("read error in " + path.string());
            double* out = page.image.data.data() + static_cast<std::size_t>(r) * width;
            if (is_float)
                convert_row<float>(buf.data(), static_cast<int>(width), out);
            else if (bps == 16)
                convert_row<uint16_t>(buf.data(), static_cast<int>(width), out);
            else
                convert_row<uint8_t>(buf.data(), static_cast<int>(width), out);
        }
        pages.push_back(std::move(page));
    } while (TIFFReadDirectory(tif.get()));
    return pages;
}

void write_tiff_pages(const std::filesystem::path& path, std::span<const Image> pages, SampleFormat format) {
    silence_libtiff();
    TiffHandle tif(TIFFOpen(path.c_str(), "w"));
    if (!tif) throw Error("cannot create TIFF: " + path.string());

    const uint16_t bps = format == SampleFormat::uint8 ? 8 : (format == SampleFormat::uint16 ? 16 : 32);
    const double max_int = format == SampleFormat::uint8 ? 255.0 : 65535.0;

    for (std::size_t p = 0; p < pages.size(); ++p) {
        const Image& img = pages[p];
        TIFFSetField(tif.get(), TIFFTAG_IMAGEWIDTH, static_cast<uint32_t>(img.cols));
        TIFFSetField(tif.get(), TIFFTAG_IMAGELENGTH, static_cast<uint32_t>(img.rows));
        TIFFSetField(tif.get(), TIFFTAG_SAMPLESPERPIXEL, uint16_t{1});
        TIFFSetField(tif.get(), TIFFTAG_BITSPERSAMPLE, bps);
        TIFFSetField(tif.get(), TIFFTAG_SAMPLEFORMAT,
                     format == SampleFormat::float32 ? SAMPLEFORMAT_IEEEFP : SAMPLEFORMAT_UINT);
        TIFFSetField(tif.get(), TIFFTAG_PHOTOMETRIC, PHOTOMETRIC_MINISBLACK);
        TIFFSetField(tif.get(), TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
        TIFFSetField(tif.get(), TIFFTAG_COMPRESSION, COMPRESSION_NONE);
        TIFFSetField(tif.get(), TIFFTAG_ROWSPERSTRIP, static_cast<uint32_t>(img.rows));
        if (pages.size() > 1) {
            TIFFSetField(tif.get(), TIFFTAG_SUBFILETYPE, FILETYPE_PAGE);
            TIFFSetField(tif.get(), TIFFTAG_PAGENUMBER, static_cast<uint16_t>(p), static_cast<uint16_t>(pages.size()));
        }

        std::vector<unsigned char> row(static_cast<std::size_t>(img.cols) * (bps / 8));
        for (int r = 0; r < img.rows; ++r) {
            for (int c = 0; c < img.cols; ++c) {
                const double v = img.at(r, c);
                if (format == SampleFormat::float32) {
                    reinterpret_cast<float*>(row.data())[c] = static_cast<float>(v);
                    continue;
                }
                if (!(v >= 0.0 && v <= max_int) || v != std::floor(v))
                    throw Error("value " + std::to_string(v) + " not representable as " + std::to_string(bps) +
                                "-bit unsigned integer");
                if (format == SampleFormat::uint16)
                    reinterpret_cast<uint16_t*>(row.data())[c] = static_cast<uint16_t>(v);
                else
                    row[static_cast<std::size_t>(c)] = static_cast<uint8_t>(v);
            }
            if (TIFFWriteScanline(tif.get(), row.data(), static_cast<uint32_t>(r), 0) < 0)
                throw Error("write error in " + path.string());
        }
        if (!TIFFWriteDirectory(tif.get())) throw Error("write error in " + path.string());
    }
}

void write_png_gray8(const std::filesystem::path& path, const Image& image) {
    for (double v : image.data)
        if (!(v >= 0.0 && v <= 255.0)) throw Error("PNG values must lie in 0..255: " + path.string());
    std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
    if (!fp) throw Error("cannot create PNG: " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw Error("libpng initialisation failed");
    }
    std::vector<png_byte> row(static_cast<std::size_t>(image.cols));
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error("PNG write failed: " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.cols), static_cast<png_uint_32>(image.rows), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int r = 0; r < image.rows; ++r) {
        for (int c = 0; c < image.cols; ++c) {
            const double v = std::round(image.at(r, c));
            row[static_cast<std::size_t>(c)] = static_cast<png_byte>(v);
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace musical::detail
