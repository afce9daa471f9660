#pragma once

#include <Eigen/Dense>
#include <vector>

#include "musical/image.hpp"
#include "musical/psf.hpp"

namespace musical {

struct PixelIndex {
    int row = 0;
    int col = 0;
};

/// One window of the stack: column t is the row-major crop of frame t.
struct WindowStack {
    PixelIndex center;
    int side = 0;
    Eigen::MatrixXd data;  // side^2 x T
};

WindowStack extract_window(const ImageStack& stack, PixelIndex center, int side);

/// Eigenimages of one window, computed from the Gram matrix A A^T.
///
/// Columns of `eigenimages` are orthonormal and sorted by descending eigenvalue.
/// Each column is sign-normalised so its largest-magnitude entry is positive.
/// Only the leading M = min(N_pix, T) pairs are kept.
struct SubspaceDecomposition {
    Eigen::MatrixXd eigenimages;     // N_pix x M
    Eigen::VectorXd eigenvalues;     // lambda_i >= 0, descending
    Eigen::VectorXd singular_values; // sqrt(lambda_i)

    int order() const { return static_cast<int>(eigenvalues.size()); }
    int pixel_count() const { return static_cast<int>(eigenimages.rows()); }
};

/// Eigenvalues below this fraction of the largest one are set to zero.
inline constexpr double kEigenvalueClampRatio = 1e-12;

SubspaceDecomposition decompose(const WindowStack& window);
SubspaceDecomposition decompose(const Eigen::MatrixXd& window_data);

/// g_i = |g . u_i| for every eigenimage.
std::vector<double> project(const SteeringVector& g, const SubspaceDecomposition& dec);

}  // namespace musical
