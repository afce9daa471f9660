#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "musical/subspace.hpp"

namespace musical {

/// Coefficient families of the generalised indicator function
///   f = (sum a_i g_i^2 / sum b_i g_i^2)^(alpha/2).
enum class Scheme { musical_hard, ev_hard, musical_soft, ev_soft };
enum class ThresholdRule { a, b, manual };

bool is_soft(Scheme s);
bool is_ev(Scheme s);
std::string to_string(Scheme s);

struct ThresholdSpec {
    Scheme scheme = Scheme::musical_hard;
    ThresholdRule rule = ThresholdRule::b;  // hard schemes only
    double sigma0 = 0.0;                    // hard schemes
    double sigma_min = 0.0;                 // soft schemes
    double sigma_max = 0.0;

    void validate() const;
};

/// Per-eigenimage signal (a) and noise (b) weights.
struct WeightVector {
    std::vector<double> a;
    std::vector<double> b;
};

struct IndicatorConfig {
    double alpha = 4.0;
    double epsilon_floor = 1e-12;

    void validate() const;
};

/// sigma_2 of every window, in window order. Each decomposition needs M >= 2.
std::vector<double> second_singular_values(std::span<const SubspaceDecomposition> windows);

/// Rule A: the smallest second singular value.
double rule_a(std::span<const double> sigma2);
/// Rule B: the midpoint of the span of second singular values.
double rule_b(std::span<const double> sigma2);
/// (min, max) of the second singular values; throws when they coincide.
std::pair<double, double> auto_soft_bounds(std::span<const double> sigma2);

/// Log-linear ramp in [0, 1]: 0 at sigma_min, 1 at sigma_max.
double soft_ramp(double sigma, double sigma_min, double sigma_max);

WeightVector weights(const SubspaceDecomposition& dec, const ThresholdSpec& spec);

/// Number of eigenimages with sigma_i >= sigma0.
int signal_cardinality(const SubspaceDecomposition& dec, double sigma0);

double indicator_value(std::span<const double> projections, const WeightVector& w, const IndicatorConfig& cfg);

}  // namespace musical
