#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "musical/image.hpp"
#include "musical/reconstruct.hpp"
#include "musical/simulate.hpp"

namespace musical {

/// Two lines crossing at `center`, symmetric about the horizontal (+x) axis.
struct CrossingLinesGeometry {
    Point2 center;
    double angle_deg = 60.0;
    double length_nm = 4000.0;

    static CrossingLinesGeometry from_params(const std::map<std::string, double>& params);
    double separation_at(double x_nm) const;  // distance between the lines at arm distance x
};

/// Two equal circles side by side on the row y = center_y.
struct TwoCirclesGeometry {
    double left_x_nm = 0.0;
    double right_x_nm = 0.0;
    double center_y_nm = 0.0;
    double diameter_nm = 200.0;

    static TwoCirclesGeometry from_params(const std::map<std::string, double>& params);
};

struct MetricSettings {
    double band_half_width = 0.4;  // fraction of the expected peak separation
    double criterion = 0.835;
    int stability_steps = 3;
};

/// Valley/peak analysis of one line profile.
struct RatioPoint {
    double x_nm = 0.0;
    double separation_nm = 0.0;
    double v = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    double r = 0.0;
};

/// r = v / min(p1, p2) with p1, p2 the maxima inside the two peak bands and v the minimum
/// inside the valley band between the positions of those maxima (all bands of the same
/// half-width). A band holding no sample falls back to the sample nearest its center. Empty profiles or a non-positive peak give nullopt.
/// `valid`, when non-empty, masks out samples that may not be used.
std::optional<RatioPoint> valley_peak_ratio(std::span<const double> positions, std::span<const double> values,
                                            double valley_center, double peak1_center, double peak2_center,
                                            double half_width, std::span<const bool> valid = {});

/// r(x) on the vertical fine-grid section nearest to center.x + x.
std::optional<RatioPoint> ratio_at(const Reconstruction& recon, const CrossingLinesGeometry& geom, double x_nm,
                                   const MetricSettings& settings = {});

/// r(x) for every fine-grid column to the right of the crossing.
std::vector<std::optional<RatioPoint>> ratio_curve(const Reconstruction& recon, const CrossingLinesGeometry& geom,
                                                   const MetricSettings& settings = {});

struct ResolutionResult {
    std::optional<double> separation_nm;  // nullopt: never resolved within the arm
    double x_nm = 0.0;
};

ResolutionResult resolution(const Reconstruction& recon, const CrossingLinesGeometry& geom,
                            const MetricSettings& settings = {});

/// c = 1 - r on the horizontal section through both circle centers.
double contrast(const Reconstruction& recon, const TwoCirclesGeometry& geom, const MetricSettings& settings = {});
std::optional<RatioPoint> circles_ratio(const Reconstruction& recon, const TwoCirclesGeometry& geom,
                                        const MetricSettings& settings = {});

/// Histogram over [0, 1] of image / max inside the processed region, normalised to sum 1.
std::vector<double> intensity_histogram(const Reconstruction& recon, int bins);
/// Fraction of processed samples with lo < image / max <= hi.
double intensity_mass(const Reconstruction& recon, double lo, double hi);

/// Mean of the processed fine samples whose lateral distance to (x, y) lies in [inner, outer].
double annulus_mean(const Reconstruction& recon, double x_nm, double y_nm, double inner_nm, double outer_nm);

/// Diffraction-limited reference: the temporal mean image less its darkest value (the uniform
/// background), resampled with cubic convolution onto the
/// fine grid of a reconstruction with the given sub-pixelation.
Reconstruction mean_image_reference(const ImageStack& stack, int subpixels);

/// Reconstruction-shaped wrapper around an arbitrary fine image (all pixels processed).
Reconstruction wrap_fine_image(Image fine, int subpixels, double pixel_size_nm);

}  // namespace musical
