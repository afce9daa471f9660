#include "musical/psf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace musical {

void PsfModel::validate() const {
    if (!(wavelength_nm > 0.0)) throw Error("psf: wavelength must be positive");
    if (!(numerical_aperture > 0.0)) throw Error("psf: numerical aperture must be positive");
    if (!(defocus_scale >= 0.0)) throw Error("psf: defocus_scale must be non-negative");
}

double PsfModel::defocused_sigma_nm(double dz_nm) const {
    const double s = gaussian_sigma_nm();
    const double k = dz_nm * defocus_scale / s;
    return s * std::sqrt(1.0 + k * k);
}

double PsfModel::intensity(double dx_nm, double dy_nm, double dz_nm) const {
    const double rho2 = dx_nm * dx_nm + dy_nm * dy_nm;
    if (kind == PsfKind::airy) {
        const double v = 2.0 * std::numbers::pi * numerical_aperture * std::sqrt(rho2) / wavelength_nm;
        if (v < 1e-8) return 1.0;
        const double amp = 2.0 * std::cyl_bessel_j(1.0, v) / v;
        return amp * amp;
    }
    const double s0 = gaussian_sigma_nm();
    const double s = defocused_sigma_nm(dz_nm);
    return (s0 * s0) / (s * s) * std::exp(-rho2 / (2.0 * s * s));
}

double PsfModel::integrated_intensity_nm2() const {
    if (kind == PsfKind::airy) {
        // integral of [2 J1(k rho) / (k rho)]^2 over the plane is 4 pi / k^2
        const double k = 2.0 * std::numbers::pi * numerical_aperture / wavelength_nm;
        return 4.0 * std::numbers::pi / (k * k);
    }
    const double s0 = gaussian_sigma_nm();
    return 2.0 * std::numbers::pi * s0 * s0;
}

double PsfModel::support_radius_nm(double dz_nm) const {
    if (kind == PsfKind::airy) return 6.0 * airy_radius_nm();
    return 4.5 * defocused_sigma_nm(dz_nm);
}

SteeringVector sample_steering_vector(const PsfModel& model, const TestPoint& point, const WindowGeometry& window) {
    if (window.side < 1 || window.side % 2 == 0) throw Error("window side must be odd");
    const int half = window.side / 2;
    const double px = window.pixel_size_nm;
    const double reach = (half + 0.5) * px;
    if (std::abs(point.x_nm) > reach || std::abs(point.y_nm) > reach)
        throw Error("test point outside the window footprint");

    SteeringVector g;
    g.source = point;
    g.values.resize(static_cast<std::size_t>(window.side) * window.side);
    double norm2 = 0.0;
    std::size_t k = 0;
    for (int r = -half; r <= half; ++r) {
        for (int c = -half; c <= half; ++c, ++k) {
            const double v = model.intensity(c * px - point.x_nm, r * px - point.y_nm, -point.z_nm);
            g.values[k] = v;
            norm2 += v * v;
        }
    }
    if (!(norm2 > 0.0)) throw Error("degenerate steering vector");
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& v : g.values) v *= inv;
    return g;
}

int default_window_side(double airy_radius_nm, double pixel_size_nm) {
    return std::max(3, 2 * static_cast<int>(std::floor(airy_radius_nm / pixel_size_nm)) + 1);
}

}  // namespace musical
