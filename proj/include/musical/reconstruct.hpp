#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "musical/image.hpp"
#include "musical/indicator.hpp"
#include "musical/psf.hpp"
#include "musical/subspace.hpp"

namespace musical {

enum class Family { musical, ev };
enum class ThresholdMode { rule_a, rule_b, soft, manual };

/// One of MUSICAL A/B/S, EV A/B/S, or a hard scheme with a manual log10(sigma0).
struct IndicatorVariant {
    Family family = Family::musical;
    ThresholdMode mode = ThresholdMode::rule_b;
    double manual_log10_sigma0 = 0.0;

    Scheme scheme() const;
    std::string name() const;
};

/// Parses `--method {musical,ev}` and `--threshold {A,B,soft,<log10 value>}`.
IndicatorVariant parse_variant(const std::string& method, const std::string& threshold);

struct ReconstructionConfig {
    int window_side = 0;  // 0: derived from the PSF main lobe and pixel size
    int subpixels_per_pixel = 10;
    IndicatorConfig indicator;
    IndicatorVariant variant;
    PsfModel psf;
    /// When set, windows whose mean intensity is below this value are ignored
    /// when computing the global threshold statistics.
    std::optional<double> threshold_min_mean;
    int threads = 0;  // 0: all cores

    int resolved_window_side(double pixel_size_nm) const;
    void validate() const;
};

/// Phase 1 of the pipeline: every interior window decomposed.
/// Independent of the indicator variant, so one analysis can feed several reconstructions.
class WindowAnalysis {
public:
    WindowAnalysis(const ImageStack& stack, int window_side, int threads);

    int side() const { return side_; }
    int margin() const { return side_ / 2; }
    int image_rows() const { return rows_; }
    int image_cols() const { return cols_; }
    int window_rows() const { return rows_ - 2 * margin(); }
    int window_cols() const { return cols_ - 2 * margin(); }
    std::size_t window_count() const { return decompositions_.size(); }
    double pixel_size_nm() const { return pixel_size_nm_; }

    /// Window index k covers center (margin + k / window_cols, margin + k % window_cols).
    PixelIndex center(std::size_t k) const;
    const SubspaceDecomposition& decomposition(std::size_t k) const { return decompositions_[k]; }
    const std::vector<SubspaceDecomposition>& decompositions() const { return decompositions_; }
    double window_mean(std::size_t k) const { return window_means_[k]; }

    /// sigma_2 of the windows that take part in the global threshold statistics.
    std::vector<double> threshold_sigma2(std::optional<double> min_mean) const;

private:
    int side_;
    int rows_;
    int cols_;
    double pixel_size_nm_;
    std::vector<SubspaceDecomposition> decompositions_;
    std::vector<double> window_means_;
};

/// Global threshold statistics turned into a concrete ThresholdSpec (the phase barrier).
ThresholdSpec resolve_threshold(const WindowAnalysis& analysis, const IndicatorVariant& variant,
                                std::optional<double> min_mean = std::nullopt);

struct Reconstruction {
    Image image;  // (H*s) x (W*s) indicator values
    int coarse_rows = 0;
    int coarse_cols = 0;
    int subpixels = 1;
    double pixel_size_nm = 0.0;
    std::vector<std::uint8_t> processed_mask;  // H x W, 1 where a window was evaluated
    ReconstructionConfig config;
    ThresholdSpec threshold;

    bool processed(int coarse_row, int coarse_col) const {
        return processed_mask[static_cast<std::size_t>(coarse_row) * coarse_cols + coarse_col] != 0;
    }
    bool fine_processed(int fine_row, int fine_col) const { return processed(fine_row / subpixels, fine_col / subpixels); }
    double fine_pixel_nm() const { return pixel_size_nm / subpixels; }
};

Reconstruction reconstruct(const ImageStack& stack, const ReconstructionConfig& cfg);
Reconstruction reconstruct(const WindowAnalysis& analysis, const ReconstructionConfig& cfg);

/// Steering vectors of the s x s subpixel centers of the central window pixel, one per column.
/// Column index is ky * s + kx.
Eigen::MatrixXd subpixel_steering_matrix(const PsfModel& psf, int window_side, double pixel_size_nm, int subpixels);

struct CardinalityMap {
    int rows = 0;
    int cols = 0;
    int max_order = 0;  // M
    std::vector<int> counts;

    int at(int r, int c) const { return counts[static_cast<std::size_t>(r) * cols + c]; }
};

/// Signal-subspace size per window center; margin pixels are 0.
CardinalityMap cardinality_map(const WindowAnalysis& analysis, double sigma0);
CardinalityMap cardinality_map(const ImageStack& stack, const ReconstructionConfig& cfg);

struct SingularValueRow {
    int row = 0;
    int col = 0;
    int order = 0;  // 1-based
    double sigma = 0.0;
    double log10_sigma = 0.0;
};

std::vector<SingularValueRow> export_singular_values(const WindowAnalysis& analysis);
std::vector<SingularValueRow> export_singular_values(const ImageStack& stack, const ReconstructionConfig& cfg);
std::string singular_values_csv(const std::vector<SingularValueRow>& rows);

/// Display mapping for export: optional log10(1 + 1e3 f / f_max), then min-max over the
/// processed region onto [0, full_scale]. Unprocessed pixels map to 0.
Image display_image(const Reconstruction& recon, double full_scale, bool log_display);
Image cardinality_display(const CardinalityMap& map);

}  // namespace musical
