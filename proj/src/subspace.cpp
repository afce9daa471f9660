#include "musical/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace musical {

WindowStack extract_window(const ImageStack& stack, PixelIndex center, int side) {
    if (side < 1 || side % 2 == 0) throw Error("window side must be odd");
    const int half = side / 2;
    if (center.row - half < 0 || center.col - half < 0 || center.row + half >= stack.height() ||
        center.col + half >= stack.width())
        throw Error("window exceeds image: center (" + std::to_string(center.row) + ", " +
                    std::to_string(center.col) + "), side " + std::to_string(side));

    WindowStack w{center, side, Eigen::MatrixXd(side * side, stack.frames())};
    for (int t = 0; t < stack.frames(); ++t) {
        const auto frame = stack.frame(t);
        int k = 0;
        for (int r = center.row - half; r <= center.row + half; ++r) {
            const double* row = frame.data() + static_cast<std::size_t>(r) * stack.width();
            for (int c = center.col - half; c <= center.col + half; ++c) w.data(k++, t) = row[c];
        }
    }
    return w;
}

SubspaceDecomposition decompose(const WindowStack& window) { return decompose(window.data); }

SubspaceDecomposition decompose(const Eigen::MatrixXd& a) {
    const Eigen::Index n_pix = a.rows();
    const Eigen::Index m = std::min(n_pix, a.cols());

    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n_pix, n_pix);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(a);
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();

    // Eigen returns ascending eigenvalues; reverse into descending order.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) throw Error("eigendecomposition failed to converge");

    SubspaceDecomposition dec;
    dec.eigenimages.resize(n_pix, m);
    dec.eigenvalues.resize(m);
    const double lambda_max = std::max(solver.eigenvalues()(n_pix - 1), 0.0);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index src = n_pix - 1 - i;
        double lambda = solver.eigenvalues()(src);
        if (lambda < kEigenvalueClampRatio * lambda_max || lambda <= 0.0) lambda = 0.0;
        dec.eigenvalues(i) = lambda;

        auto u = dec.eigenimages.col(i);
        u = solver.eigenvectors().col(src);
        Eigen::Index arg = 0;
        u.cwiseAbs().maxCoeff(&arg);
        if (u(arg) < 0.0) u = -u;
    }
    dec.singular_values = dec.eigenvalues.cwiseSqrt();
    return dec;
}

std::vector<double> project(const SteeringVector& g, const SubspaceDecomposition& dec) {
    if (static_cast<Eigen::Index>(g.values.size()) != dec.eigenimages.rows())
        throw Error("steering vector length " + std::to_string(g.values.size()) +
                    " does not match eigenimage length " + std::to_string(dec.eigenimages.rows()));
    const Eigen::Map<const Eigen::VectorXd> gv(g.values.data(), static_cast<Eigen::Index>(g.values.size()));
    const Eigen::VectorXd p = (dec.eigenimages.transpose() * gv).cwiseAbs();
    return {p.data(), p.data() + p.size()};
}

}  // namespace musical
