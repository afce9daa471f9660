#include "musical/indicator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace musical {

bool is_soft(Scheme s) { return s == Scheme::musical_soft || s == Scheme::ev_soft; }
bool is_ev(Scheme s) { return s == Scheme::ev_hard || s == Scheme::ev_soft; }

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::musical_hard: return "musical_hard";
        case Scheme::ev_hard: return "ev_hard";
        case Scheme::musical_soft: return "musical_soft";
        case Scheme::ev_soft: return "ev_soft";
    }
    return "?";
}

void ThresholdSpec::validate() const {
    if (is_soft(scheme)) {
        if (!(sigma_min > 0.0) || !(sigma_max > 0.0)) throw Error("soft bounds must be positive");
        if (!(sigma_min < sigma_max)) throw Error("degenerate soft bounds");
    } else if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) {
        throw Error("hard threshold sigma0 must be positive");
    }
}

void IndicatorConfig::validate() const {
    if (!(alpha > 0.0)) throw Error("alpha must be positive");
    if (!(epsilon_floor > 0.0)) throw Error("epsilon floor must be positive");
}

std::vector<double> second_singular_values(std::span<const SubspaceDecomposition> windows) {
    std::vector<double> out;
    out.reserve(windows.size());
    for (const auto& d : windows) {
        if (d.order() < 2) throw Error("second singular value needs at least 2 eigenimages");
        out.push_back(d.singular_values(1));
    }
    return out;
}

double rule_a(std::span<const double> sigma2) {
    if (sigma2.empty()) throw Error("rule A needs at least one window");
    return *std::min_element(sigma2.begin(), sigma2.end());
}

double rule_b(std::span<const double> sigma2) {
    if (sigma2.empty()) throw Error("rule B needs at least one window");
    const auto [lo, hi] = std::minmax_element(sigma2.begin(), sigma2.end());
    return 0.5 * (*lo + *hi);
}

std::pair<double, double> auto_soft_bounds(std::span<const double> sigma2) {
    if (sigma2.empty()) throw Error("soft bounds need at least one window");
    const auto [lo, hi] = std::minmax_element(sigma2.begin(), sigma2.end());
    if (!(*hi > *lo)) throw Error("degenerate soft bounds");
    return {*lo, *hi};
}

double soft_ramp(double sigma, double sigma_min, double sigma_max) {
    if (sigma >= sigma_max) return 1.0;
    if (sigma <= sigma_min) return 0.0;
    const double t = (std::log10(sigma) - std::log10(sigma_min)) / (std::log10(sigma_max) - std::log10(sigma_min));
    return std::clamp(t, 0.0, 1.0);
}

WeightVector weights(const SubspaceDecomposition& dec, const ThresholdSpec& spec) {
    spec.validate();
    const int m = dec.order();
    WeightVector w{std::vector<double>(static_cast<std::size_t>(m)), std::vector<double>(static_cast<std::size_t>(m))};
    for (int i = 0; i < m; ++i) {
        const double sigma = dec.singular_values(i);
        const double share = is_soft(spec.scheme) ? soft_ramp(sigma, spec.sigma_min, spec.sigma_max)
                                                  : (sigma >= spec.sigma0 ? 1.0 : 0.0);
        double total = 1.0;
        if (is_ev(spec.scheme)) {
            const double lambda = dec.eigenvalues(i);
            total = lambda > 0.0 ? 1.0 / lambda : 0.0;
        }
        const auto k = static_cast<std::size_t>(i);
        w.a[k] = total * share;
        w.b[k] = share == 1.0 ? 0.0 : total - w.a[k];
    }
    return w;
}

int signal_cardinality(const SubspaceDecomposition& dec, double sigma0) {
    int n = 0;
    for (int i = 0; i < dec.order(); ++i)
        if (dec.singular_values(i) >= sigma0) ++n;
    return n;
}

double indicator_value(std::span<const double> projections, const WeightVector& w, const IndicatorConfig& cfg) {
    if (projections.size() != w.a.size() || projections.size() != w.b.size())
        throw Error("projection and weight lengths differ");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < projections.size(); ++i) {
        const double g2 = projections[i] * projections[i];
        num += w.a[i] * g2;
        den += w.b[i] * g2;
    }
    den = std::max(den, cfg.epsilon_floor * num + std::numeric_limits<double>::min());
    return std::pow(num / den, 0.5 * cfg.alpha);
}

}  // namespace musical
