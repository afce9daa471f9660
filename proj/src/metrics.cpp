#include "musical/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "musical/stack_io.hpp"

namespace musical {

namespace {

double param(const std::map<std::string, double>& params, const std::string& key) {
    const auto it = params.find(key);
    if (it == params.end()) throw Error("ground-truth geometry lacks '" + key + "'");
    return it->second;
}

struct BandExtreme {
    double value;
    double position;
    bool found;
};

// Extreme of the valid samples within half_width of center, restricted to [lo, hi].
// With no sample in the band, the valid sample of [lo, hi] nearest the center stands in.
BandExtreme band_extreme(std::span<const double> pos, std::span<const double> val, std::span<const bool> valid,
                         double center, double half_width, bool want_max,
                         double lo = -std::numeric_limits<double>::infinity(),
                         double hi = std::numeric_limits<double>::infinity()) {
    BandExtreme best{want_max ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity(),
                     center, false};
    std::size_t nearest = pos.size();
    double nearest_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pos.size(); ++i) {
        if (!valid.empty() && !valid[i]) continue;
        if (pos[i] < lo || pos[i] > hi) continue;
        const double d = std::abs(pos[i] - center);
        if (d < nearest_d) {
            nearest_d = d;
            nearest = i;
        }
        if (d > half_width) continue;
        if (!best.found || (want_max ? val[i] > best.value : val[i] < best.value)) best = {val[i], pos[i], true};
    }
    if (!best.found && nearest < pos.size()) best = {val[nearest], pos[nearest], true};
    return best;
}

}  // namespace

CrossingLinesGeometry CrossingLinesGeometry::from_params(const std::map<std::string, double>& p) {
    return {{param(p, "center_x_nm"), param(p, "center_y_nm")}, param(p, "angle_deg"), param(p, "length_nm")};
}

double CrossingLinesGeometry::separation_at(double x_nm) const {
    return 2.0 * x_nm * std::tan(angle_deg * std::numbers::pi / 360.0);
}

TwoCirclesGeometry TwoCirclesGeometry::from_params(const std::map<std::string, double>& p) {
    return {param(p, "left_x_nm"), param(p, "right_x_nm"), param(p, "center_y_nm"), param(p, "diameter_nm")};
}

std::optional<RatioPoint> valley_peak_ratio(std::span<const double> positions, std::span<const double> values,
                                            double valley_center, double peak1_center, double peak2_center,
                                            double half_width, std::span<const bool> valid) {
    if (positions.size() != values.size() || positions.empty()) return std::nullopt;
    const auto p1 = band_extreme(positions, values, valid, peak1_center, half_width, true);
    const auto p2 = band_extreme(positions, values, valid, peak2_center, half_width, true);
    if (!p1.found || !p2.found) return std::nullopt;
    // the valley has to lie between the two maxima; a single blob gives r = 1, not a dip
    const auto v = band_extreme(positions, values, valid, valley_center, half_width, false,
                                std::min(p1.position, p2.position), std::max(p1.position, p2.position));
    if (!v.found) return std::nullopt;
    const double peak = std::min(p1.value, p2.value);
    if (!(peak > 0.0)) return std::nullopt;
    RatioPoint out;
    out.v = v.value;
    out.p1 = p1.value;
    out.p2 = p2.value;
    out.r = v.value / peak;
    out.separation_nm = std::abs(peak2_center - peak1_center);
    return out;
}

namespace {

std::optional<RatioPoint> ratio_at_column(const Reconstruction& recon, const CrossingLinesGeometry& geom, int col,
                                          const MetricSettings& settings) {
    const double fp = recon.fine_pixel_nm();
    const double x = (col + 0.5) * fp - geom.center.x;
    const double sep = geom.separation_at(x);
    if (!(sep > 0.0)) return std::nullopt;
    const double top = geom.center.y - 0.5 * sep;
    const double bottom = geom.center.y + 0.5 * sep;
    const double hw = settings.band_half_width * sep;

    const int rows = recon.image.rows;
    std::vector<double> pos(static_cast<std::size_t>(rows));
    std::vector<double> val(static_cast<std::size_t>(rows));
    std::unique_ptr<bool[]> valid(new bool[static_cast<std::size_t>(rows)]);
    for (int r = 0; r < rows; ++r) {
        pos[static_cast<std::size_t>(r)] = (r + 0.5) * fp;
        val[static_cast<std::size_t>(r)] = recon.image.at(r, col);
        valid[static_cast<std::size_t>(r)] = recon.fine_processed(r, col);
    }
    // the peak bands must lie on the imaged, processed part of the section
    const double reach_lo = top - hw;
    const double reach_hi = bottom + hw;
    if (reach_lo < 0.0 || reach_hi > rows * fp) return std::nullopt;
    const int r_lo = std::clamp(static_cast<int>(std::floor(reach_lo / fp)), 0, rows - 1);
    const int r_hi = std::clamp(static_cast<int>(std::floor(reach_hi / fp)), 0, rows - 1);
    if (!valid[static_cast<std::size_t>(r_lo)] || !valid[static_cast<std::size_t>(r_hi)]) return std::nullopt;

    auto out = valley_peak_ratio(pos, val, geom.center.y, top, bottom, hw,
                                 std::span<const bool>(valid.get(), static_cast<std::size_t>(rows)));
    if (out) out->x_nm = x;
    return out;
}

}  // namespace

std::optional<RatioPoint> ratio_at(const Reconstruction& recon, const CrossingLinesGeometry& geom, double x_nm,
                                   const MetricSettings& settings) {
    const double fp = recon.fine_pixel_nm();
    const int col = static_cast<int>(std::floor((geom.center.x + x_nm) / fp));
    if (col < 0 || col >= recon.image.cols) return std::nullopt;
    return ratio_at_column(recon, geom, col, settings);
}

std::vector<std::optional<RatioPoint>> ratio_curve(const Reconstruction& recon, const CrossingLinesGeometry& geom,
                                                   const MetricSettings& settings) {
    const double fp = recon.fine_pixel_nm();
    const double arm = 0.5 * geom.length_nm * std::cos(geom.angle_deg * std::numbers::pi / 360.0);
    std::vector<std::optional<RatioPoint>> curve;
    int col = static_cast<int>(std::floor(geom.center.x / fp));
    if ((col + 0.5) * fp - geom.center.x <= 0.0) ++col;
    for (; col < recon.image.cols && (col + 0.5) * fp - geom.center.x <= arm; ++col)
        curve.push_back(ratio_at_column(recon, geom, col, settings));
    return curve;
}

ResolutionResult resolution(const Reconstruction& recon, const CrossingLinesGeometry& geom,
                            const MetricSettings& settings) {
    const auto curve = ratio_curve(recon, geom, settings);
    auto resolved = [&](std::size_t i) { return curve[i] && curve[i]->r <= settings.criterion; };
    const auto need = static_cast<std::size_t>(settings.stability_steps);
    for (std::size_t i = 0; i + need < curve.size(); ++i) {
        bool stable = true;
        for (std::size_t j = i; j <= i + need && stable; ++j) stable = resolved(j);
        if (stable) return {curve[i]->separation_nm, curve[i]->x_nm};
    }
    return {std::nullopt, 0.0};
}

std::optional<RatioPoint> circles_ratio(const Reconstruction& recon, const TwoCirclesGeometry& geom,
                                        const MetricSettings& settings) {
    const double fp = recon.fine_pixel_nm();
    const int row = static_cast<int>(std::floor(geom.center_y_nm / fp));
    if (row < 0 || row >= recon.image.rows) return std::nullopt;
    const double radius = 0.5 * geom.diameter_nm;
    const double near_left = geom.left_x_nm + radius;
    const double near_right = geom.right_x_nm - radius;
    const double gap = near_right - near_left;
    const int cols = recon.image.cols;
    std::vector<double> pos(static_cast<std::size_t>(cols));
    std::vector<double> val(static_cast<std::size_t>(cols));
    std::unique_ptr<bool[]> valid(new bool[static_cast<std::size_t>(cols)]);
    for (int c = 0; c < cols; ++c) {
        pos[static_cast<std::size_t>(c)] = (c + 0.5) * fp;
        val[static_cast<std::size_t>(c)] = recon.image.at(row, c);
        valid[static_cast<std::size_t>(c)] = recon.fine_processed(row, c);
    }
    return valley_peak_ratio(pos, val, 0.5 * (near_left + near_right), near_left, near_right,
                             settings.band_half_width * gap,
                             std::span<const bool>(valid.get(), static_cast<std::size_t>(cols)));
}

double contrast(const Reconstruction& recon, const TwoCirclesGeometry& geom, const MetricSettings& settings) {
    const auto r = circles_ratio(recon, geom, settings);
    if (!r) throw Error("contrast: peaks not found");
    return 1.0 - r->r;
}

namespace {

double processed_max(const Reconstruction& recon) {
    double m = 0.0;
    for (int r = 0; r < recon.image.rows; ++r)
        for (int c = 0; c < recon.image.cols; ++c)
            if (recon.fine_processed(r, c)) m = std::max(m, recon.image.at(r, c));
    if (!(m > 0.0)) throw Error("all-zero image");
    return m;
}

}  // namespace

std::vector<double> intensity_histogram(const Reconstruction& recon, int bins) {
    if (bins < 1) throw Error("histogram needs at least one bin");
    const double m = processed_max(recon);
    std::vector<double> h(static_cast<std::size_t>(bins), 0.0);
    double total = 0.0;
    for (int r = 0; r < recon.image.rows; ++r) {
        for (int c = 0; c < recon.image.cols; ++c) {
            if (!recon.fine_processed(r, c)) continue;
            const double v = recon.image.at(r, c) / m;
            const int b = std::clamp(static_cast<int>(std::floor(v * bins)), 0, bins - 1);
            h[static_cast<std::size_t>(b)] += 1.0;
            total += 1.0;
        }
    }
    for (double& x : h) x /= total;
    return h;
}

double intensity_mass(const Reconstruction& recon, double lo, double hi) {
    const double m = processed_max(recon);
    double in = 0.0;
    double total = 0.0;
    for (int r = 0; r < recon.image.rows; ++r) {
        for (int c = 0; c < recon.image.cols; ++c) {
            if (!recon.fine_processed(r, c)) continue;
            const double v = recon.image.at(r, c) / m;
            if (v > lo && v <= hi) in += 1.0;
            total += 1.0;
        }
    }
    return in / total;
}

double annulus_mean(const Reconstruction& recon, double x_nm, double y_nm, double inner_nm, double outer_nm) {
    const double fp = recon.fine_pixel_nm();
    double sum = 0.0;
    std::size_t n = 0;
    const int r0 = std::max(0, static_cast<int>(std::floor((y_nm - outer_nm) / fp)));
    const int r1 = std::min(recon.image.rows - 1, static_cast<int>(std::floor((y_nm + outer_nm) / fp)));
    const int c0 = std::max(0, static_cast<int>(std::floor((x_nm - outer_nm) / fp)));
    const int c1 = std::min(recon.image.cols - 1, static_cast<int>(std::floor((x_nm + outer_nm) / fp)));
    for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
            if (!recon.fine_processed(r, c)) continue;
            const double d = std::hypot((c + 0.5) * fp - x_nm, (r + 0.5) * fp - y_nm);
            if (d < inner_nm || d > outer_nm) continue;
            sum += recon.image.at(r, c);
            ++n;
        }
    }
    if (n == 0) throw Error("annulus contains no processed samples");
    return sum / static_cast<double>(n);
}

Reconstruction wrap_fine_image(Image fine, int subpixels, double pixel_size_nm) {
    if (subpixels < 1 || fine.rows % subpixels != 0 || fine.cols % subpixels != 0)
        throw Error("fine image size must be a multiple of the sub-pixelation");
    Reconstruction out;
    out.coarse_rows = fine.rows / subpixels;
    out.coarse_cols = fine.cols / subpixels;
    out.subpixels = subpixels;
    out.pixel_size_nm = pixel_size_nm;
    out.image = std::move(fine);
    out.processed_mask.assign(static_cast<std::size_t>(out.coarse_rows) * out.coarse_cols, 1);
    return out;
}

namespace {

// Keys cubic convolution kernel, a = -0.5.
double cubic_weight(double t) {
    t = std::abs(t);
    if (t < 1.0) return (1.5 * t - 2.5) * t * t + 1.0;
    if (t < 2.0) return ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0;
    return 0.0;
}

struct Taps {
    std::array<int, 4> index{};
    std::array<double, 4> weight{};
};

std::vector<Taps> cubic_taps(int coarse, int s) {
    std::vector<Taps> taps(static_cast<std::size_t>(coarse) * s);
    for (int i = 0; i < coarse * s; ++i) {
        const double u = (i + 0.5) / s - 0.5;
        const int base = static_cast<int>(std::floor(u)) - 1;
        auto& t = taps[static_cast<std::size_t>(i)];
        for (int k = 0; k < 4; ++k) {
            t.index[k] = std::clamp(base + k, 0, coarse - 1);
            t.weight[k] = cubic_weight(u - (base + k));
        }
    }
    return taps;
}

}  // namespace

Reconstruction mean_image_reference(const ImageStack& stack, int subpixels) {
    Image mean = stack_summary(stack).mean_image;
    // uniform background offset: the darkest pixel of the mean image
    const double offset = *std::min_element(mean.data.begin(), mean.data.end());
    for (double& v : mean.data) v -= offset;

    const int s = subpixels;
    const auto row_taps = cubic_taps(mean.rows, s);
    const auto col_taps = cubic_taps(mean.cols, s);
    Image fine(mean.rows * s, mean.cols * s);
    for (int r = 0; r < fine.rows; ++r) {
        const auto& ty = row_taps[static_cast<std::size_t>(r)];
        for (int c = 0; c < fine.cols; ++c) {
            const auto& tx = col_taps[static_cast<std::size_t>(c)];
            double v = 0.0;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) v += ty.weight[i] * tx.weight[j] * mean.at(ty.index[i], tx.index[j]);
            fine.at(r, c) = std::max(v, 0.0);
        }
    }
    return wrap_fine_image(std::move(fine), s, stack.calibration().pixel_size_nm);
}

}  // namespace musical
