#include "musical/reconstruct.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "musical/parallel.hpp"

namespace musical {

Scheme IndicatorVariant::scheme() const {
    const bool soft = mode == ThresholdMode::soft;
    if (family == Family::musical) return soft ? Scheme::musical_soft : Scheme::musical_hard;
    return soft ? Scheme::ev_soft : Scheme::ev_hard;
}

std::string IndicatorVariant::name() const {
    std::string n = family == Family::musical ? "MUSICAL" : "EV";
    switch (mode) {
        case ThresholdMode::rule_a: return n + " A";
        case ThresholdMode::rule_b: return n + " B";
        case ThresholdMode::soft: return n + "-S";
        case ThresholdMode::manual: {
            std::ostringstream os;
            os << n << " log10(sigma0)=" << manual_log10_sigma0;
            return os.str();
        }
    }
    return n;
}

IndicatorVariant parse_variant(const std::string& method, const std::string& threshold) {
    IndicatorVariant v;
    if (method == "musical")
        v.family = Family::musical;
    else if (method == "ev")
        v.family = Family::ev;
    else
        throw Error("unknown method '" + method + "' (expected musical or ev)");

    if (threshold == "A" || threshold == "a") {
        v.mode = ThresholdMode::rule_a;
    } else if (threshold == "B" || threshold == "b") {
        v.mode = ThresholdMode::rule_b;
    } else if (threshold == "soft" || threshold == "S") {
        v.mode = ThresholdMode::soft;
    } else {
        double value = 0.0;
        const char* first = threshold.data();
        const char* last = first + threshold.size();
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last || !std::isfinite(value))
            throw Error("invalid threshold '" + threshold + "' (expected A, B, soft or a log10 value)");
        v.mode = ThresholdMode::manual;
        v.manual_log10_sigma0 = value;
    }
    return v;
}

int ReconstructionConfig::resolved_window_side(double pixel_size_nm) const {
    if (window_side > 0) return window_side;
    return std::max(3, default_window_side(psf.airy_radius_nm(), pixel_size_nm));
}

void ReconstructionConfig::validate() const {
    if (subpixels_per_pixel < 1) throw Error("subpixels per pixel must be >= 1");
    if (window_side != 0 && (window_side < 3 || window_side % 2 == 0))
        throw Error("window side must be odd and >= 3");
    indicator.validate();
    psf.validate();
}

WindowAnalysis::WindowAnalysis(const ImageStack& stack, int window_side, int threads)
    : side_(window_side),
      rows_(stack.height()),
      cols_(stack.width()),
      pixel_size_nm_(stack.calibration().pixel_size_nm) {
    if (side_ < 3 || side_ % 2 == 0) throw Error("window side must be odd and >= 3");
    if (side_ > rows_ || side_ > cols_)
        throw Error("image smaller than window (" + std::to_string(rows_) + "x" + std::to_string(cols_) +
                    " vs side " + std::to_string(side_) + ")");
    const std::size_t n = static_cast<std::size_t>(window_rows()) * static_cast<std::size_t>(window_cols());
    decompositions_.resize(n);
    window_means_.resize(n);
    parallel_for(n, threads, [&](std::size_t k) {
        const WindowStack w = extract_window(stack, center(k), side_);
        window_means_[k] = w.data.mean();
        decompositions_[k] = decompose(w);
    });
}

PixelIndex WindowAnalysis::center(std::size_t k) const {
    const auto wc = static_cast<std::size_t>(window_cols());
    return {margin() + static_cast<int>(k / wc), margin() + static_cast<int>(k % wc)};
}

std::vector<double> WindowAnalysis::threshold_sigma2(std::optional<double> min_mean) const {
    std::vector<double> out;
    out.reserve(decompositions_.size());
    for (std::size_t k = 0; k < decompositions_.size(); ++k) {
        if (min_mean && window_means_[k] < *min_mean) continue;
        const auto& d = decompositions_[k];
        if (d.order() < 2) throw Error("second singular value needs at least 2 eigenimages");
        out.push_back(d.singular_values(1));
    }
    if (out.empty()) throw Error("threshold window filter excluded every window");
    return out;
}

ThresholdSpec resolve_threshold(const WindowAnalysis& analysis, const IndicatorVariant& variant,
                                std::optional<double> min_mean) {
    ThresholdSpec spec;
    spec.scheme = variant.scheme();
    if (variant.mode == ThresholdMode::manual) {
        spec.rule = ThresholdRule::manual;
        spec.sigma0 = std::pow(10.0, variant.manual_log10_sigma0);
        spec.validate();
        return spec;
    }
    const auto sigma2 = analysis.threshold_sigma2(min_mean);
    switch (variant.mode) {
        case ThresholdMode::rule_a:
            spec.rule = ThresholdRule::a;
            spec.sigma0 = rule_a(sigma2);
            break;
        case ThresholdMode::rule_b:
            spec.rule = ThresholdRule::b;
            spec.sigma0 = rule_b(sigma2);
            break;
        case ThresholdMode::soft: {
            const auto [lo, hi] = auto_soft_bounds(sigma2);
            spec.sigma_min = lo;
            spec.sigma_max = hi;
            break;
        }
        case ThresholdMode::manual: break;
    }
    spec.validate();
    return spec;
}

Eigen::MatrixXd subpixel_steering_matrix(const PsfModel& psf, int window_side, double pixel_size_nm, int subpixels) {
    const int s = subpixels;
    Eigen::MatrixXd g(window_side * window_side, s * s);
    const WindowGeometry geom{window_side, pixel_size_nm};
    for (int ky = 0; ky < s; ++ky) {
        for (int kx = 0; kx < s; ++kx) {
            const TestPoint p{((kx + 0.5) / s - 0.5) * pixel_size_nm, ((ky + 0.5) / s - 0.5) * pixel_size_nm, 0.0};
            const SteeringVector v = sample_steering_vector(psf, p, geom);
            g.col(ky * s + kx) = Eigen::Map<const Eigen::VectorXd>(v.values.data(), static_cast<Eigen::Index>(v.values.size()));
        }
    }
    return g;
}

Reconstruction reconstruct(const ImageStack& stack, const ReconstructionConfig& cfg) {
    cfg.validate();
    const WindowAnalysis analysis(stack, cfg.resolved_window_side(stack.calibration().pixel_size_nm), cfg.threads);
    return reconstruct(analysis, cfg);
}

Reconstruction reconstruct(const WindowAnalysis& analysis, const ReconstructionConfig& cfg) {
    cfg.validate();
    const int s = cfg.subpixels_per_pixel;
    if (cfg.window_side != 0 && cfg.window_side != analysis.side())
        throw Error("window analysis side does not match configuration");

    Reconstruction out;
    out.coarse_rows = analysis.image_rows();
    out.coarse_cols = analysis.image_cols();
    out.subpixels = s;
    out.pixel_size_nm = analysis.pixel_size_nm();
    out.config = cfg;
    out.config.window_side = analysis.side();
    out.image = Image(out.coarse_rows * s, out.coarse_cols * s);
    out.processed_mask.assign(static_cast<std::size_t>(out.coarse_rows) * out.coarse_cols, 0);
    out.threshold = resolve_threshold(analysis, cfg.variant, cfg.threshold_min_mean);

    const Eigen::MatrixXd steering = subpixel_steering_matrix(cfg.psf, analysis.side(), analysis.pixel_size_nm(), s);

    parallel_for(analysis.window_count(), cfg.threads, [&](std::size_t k) {
        const auto& dec = analysis.decomposition(k);
        const WeightVector w = weights(dec, out.threshold);
        const Eigen::MatrixXd proj = (dec.eigenimages.transpose() * steering).cwiseAbs();
        const PixelIndex p = analysis.center(k);
        for (int ky = 0; ky < s; ++ky) {
            for (int kx = 0; kx < s; ++kx) {
                const auto col = proj.col(ky * s + kx);
                out.image.at(p.row * s + ky, p.col * s + kx) =
                    indicator_value(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), w,
                                    cfg.indicator);
            }
        }
        out.processed_mask[static_cast<std::size_t>(p.row) * out.coarse_cols + p.col] = 1;
    });
    return out;
}

CardinalityMap cardinality_map(const WindowAnalysis& analysis, double sigma0) {
    CardinalityMap map;
    map.rows = analysis.image_rows();
    map.cols = analysis.image_cols();
    map.counts.assign(static_cast<std::size_t>(map.rows) * map.cols, 0);
    for (std::size_t k = 0; k < analysis.window_count(); ++k) {
        const auto& dec = analysis.decomposition(k);
        map.max_order = std::max(map.max_order, dec.order());
        const PixelIndex p = analysis.center(k);
        map.counts[static_cast<std::size_t>(p.row) * map.cols + p.col] = signal_cardinality(dec, sigma0);
    }
    return map;
}

CardinalityMap cardinality_map(const ImageStack& stack, const ReconstructionConfig& cfg) {
    if (cfg.variant.mode == ThresholdMode::soft) throw Error("cardinality undefined for soft thresholding");
    cfg.validate();
    const WindowAnalysis analysis(stack, cfg.resolved_window_side(stack.calibration().pixel_size_nm), cfg.threads);
    const ThresholdSpec spec = resolve_threshold(analysis, cfg.variant, cfg.threshold_min_mean);
    return cardinality_map(analysis, spec.sigma0);
}

std::vector<SingularValueRow> export_singular_values(const WindowAnalysis& analysis) {
    std::vector<SingularValueRow> rows;
    for (std::size_t k = 0; k < analysis.window_count(); ++k) {
        const auto& dec = analysis.decomposition(k);
        const PixelIndex p = analysis.center(k);
        for (int i = 0; i < dec.order(); ++i) {
            const double sigma = dec.singular_values(i);
            rows.push_back({p.row, p.col, i + 1, sigma, std::log10(sigma)});
        }
    }
    return rows;
}

std::vector<SingularValueRow> export_singular_values(const ImageStack& stack, const ReconstructionConfig& cfg) {
    cfg.validate();
    const WindowAnalysis analysis(stack, cfg.resolved_window_side(stack.calibration().pixel_size_nm), cfg.threads);
    return export_singular_values(analysis);
}

std::string singular_values_csv(const std::vector<SingularValueRow>& rows) {
    std::ostringstream os;
    os.precision(17);
    os << "row,col,order,sigma,log10_sigma\n";
    for (const auto& r : rows) os << r.row << ',' << r.col << ',' << r.order << ',' << r.sigma << ',' << r.log10_sigma << '\n';
    return os.str();
}

Image display_image(const Reconstruction& recon, double full_scale, bool log_display) {
    Image out(recon.image.rows, recon.image.cols);
    double fmax = 0.0;
    for (int r = 0; r < recon.image.rows; ++r)
        for (int c = 0; c < recon.image.cols; ++c)
            if (recon.fine_processed(r, c)) fmax = std::max(fmax, recon.image.at(r, c));

    auto transform = [&](double f) { return log_display && fmax > 0.0 ? std::log10(1.0 + f / fmax * 1e3) : f; };

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < recon.image.rows; ++r) {
        for (int c = 0; c < recon.image.cols; ++c) {
            if (!recon.fine_processed(r, c)) continue;
            const double v = transform(recon.image.at(r, c));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!(hi > lo)) return out;
    const double scale = full_scale / (hi - lo);
    for (int r = 0; r < recon.image.rows; ++r)
        for (int c = 0; c < recon.image.cols; ++c)
            if (recon.fine_processed(r, c)) out.at(r, c) = std::round((transform(recon.image.at(r, c)) - lo) * scale);
    return out;
}

Image cardinality_display(const CardinalityMap& map) {
    Image out(map.rows, map.cols);
    if (map.max_order == 0) return out;
    for (std::size_t k = 0; k < map.counts.size(); ++k)
        out.data[k] = std::round(255.0 * map.counts[k] / map.max_order);
    return out;
}

}  // namespace musical
