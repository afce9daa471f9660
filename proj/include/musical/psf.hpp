#pragma once

#include <vector>

#include "musical/image.hpp"

namespace musical {

enum class PsfKind { gaussian, airy };

/// Point-spread function of a widefield microscope.
///
/// The gaussian kind approximates the Airy main lobe with sigma = airy_radius / 2.9
/// and broadens with defocus as sigma_eff(dz) = sigma * sqrt(1 + (dz * defocus_scale / sigma)^2),
/// scaling the peak by (sigma / sigma_eff)^2 so the integrated energy does not depend on dz.
/// The airy kind is in-focus only.
struct PsfModel {
    PsfKind kind = PsfKind::gaussian;
    double wavelength_nm = 665.0;
    double numerical_aperture = 1.42;
    double defocus_scale = 0.4;

    void validate() const;

    double airy_radius_nm() const { return 0.61 * wavelength_nm / numerical_aperture; }
    double gaussian_sigma_nm() const { return airy_radius_nm() / 2.9; }
    double defocused_sigma_nm(double dz_nm) const;

    /// Peak-normalised intensity at a lateral/axial offset from the emitter.
    double intensity(double dx_nm, double dy_nm, double dz_nm) const;

    /// Area integral of intensity() over the lateral plane (nm^2). Independent of dz.
    double integrated_intensity_nm2() const;

    /// Lateral distance beyond which intensity() is negligible for rendering purposes.
    double support_radius_nm(double dz_nm) const;
};

inline double psf_intensity(const PsfModel& model, double dx_nm, double dy_nm, double dz_nm) {
    return model.intensity(dx_nm, dy_nm, dz_nm);
}

struct TestPoint {
    double x_nm = 0.0;  // relative to the window center; x runs along columns
    double y_nm = 0.0;  // y runs along rows
    double z_nm = 0.0;
};

struct WindowGeometry {
    int side = 7;  // odd
    double pixel_size_nm = 80.0;
};

/// Unit-norm, nonnegative PSF samples at every pixel center of a window (row-major).
struct SteeringVector {
    std::vector<double> values;
    TestPoint source;
};

SteeringVector sample_steering_vector(const PsfModel& model, const TestPoint& point, const WindowGeometry& window);

/// Default window side: smallest odd window covering the PSF main lobe.
int default_window_side(double airy_radius_nm, double pixel_size_nm);

}  // namespace musical
