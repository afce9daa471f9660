// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "musical/metrics.hpp"
#include "musical/reconstruct.hpp"
#include "musical/simulate.hpp"

using namespace musical;

namespace {

constexpr int kSeeds = 5;
constexpr int kWorkers = 0;  // all cores for the measurements; determinism is checked separately

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

std::string fmt(double v, int precision = 4) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

std::string join(const std::vector<double>& v, int precision = 4) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(v[i], precision);
    return s;
}

Simulation simulate_scene(SceneKind kind, std::uint64_t seed, int threads = kWorkers, double duty = 0.05) {
    SimulationRequest q;
    q.kind = kind;
    q.seed = seed;
    q.duty = duty;
    q.threads = threads;
    return simulate(q);
}

ReconstructionConfig variant_config(const std::string& method, const std::string& threshold, int threads = kWorkers) {
    ReconstructionConfig cfg;
    cfg.variant = parse_variant(method, threshold);
    cfg.threads = threads;
    return cfg;
}

Reconstruction run(const ImageStack& st, const std::string& method, const std::string& threshold,
                   int threads = kWorkers) {
    return reconstruct(st, variant_config(method, threshold, threads));
}

SubspaceDecomposition from_sigmas(const std::vector<double>& sigmas) {
    SubspaceDecomposition d;
    const auto m = static_cast<Eigen::Index>(sigmas.size());
    d.eigenimages = Eigen::MatrixXd::Identity(m, m);
    d.singular_values = Eigen::Map<const Eigen::VectorXd>(sigmas.data(), m);
    d.eigenvalues = d.singular_values.cwiseAbs2();
    return d;
}

// ---------------------------------------------------------------------------

Outcome hard_oracle() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> offset(-40.0, 40.0);
    std::uniform_real_distribution<double> alpha(0.5, 6.0);
    const PsfModel psf;
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        // T >= N_pix: the eigenimages span the whole window space, so the noise part of g is
        // everything the signal projector leaves behind
        const int frames = 49 + static_cast<int>(rng() % 52);
        const auto m = oracle::random_matrix(49, frames, rng, 0.0, 100.0);
        Eigen::MatrixXd a(49, frames);
        for (int r = 0; r < 49; ++r)
            for (int t = 0; t < frames; ++t) a(r, t) = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(t)];
        const auto dec = decompose(a);
        const int k = 1 + static_cast<int>(rng() % 47);
        const double sigma0 = std::sqrt(dec.singular_values(k - 1) * dec.singular_values(k));
        const auto g = sample_steering_vector(psf, {offset(rng), offset(rng), 0.0}, {7, 80.0});
        IndicatorConfig cfg;
        cfg.alpha = alpha(rng);
        const double f = indicator_value(project(g, dec),
                                         weights(dec, {Scheme::musical_hard, ThresholdRule::manual, sigma0}), cfg);

        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
        const Eigen::MatrixXd us = svd.matrixU().leftCols(k);
        const Eigen::VectorXd gv = Eigen::Map<const Eigen::VectorXd>(g.values.data(), 49);
        const Eigen::VectorXd gs = us * (us.transpose() * gv);
        const double direct = std::pow(gs.norm() / (gv - gs).norm(), cfg.alpha);
        worst = std::max(worst, oracle::relative_error(f, direct));
    }
    const double t = seconds_since(start);
    return {worst < 1e-9 && t < 10.0, "worst relative error " + fmt(worst) + ", " + fmt(t, 3) + " s"};
}

Outcome decomposition_oracle() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 49);
        const int t = 1 + static_cast<int>(rng() % 100);
        const auto m = oracle::random_matrix(n, t, rng, 0.0, 1000.0);
        Eigen::MatrixXd a(n, t);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < t; ++c) a(r, c) = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        const auto dec = decompose(a);
        const auto ref = oracle::jacobi_singular_values(m);
        if (dec.order() != std::min(n, t)) return {false, "wrong order for " + std::to_string(n) + "x" + std::to_string(t)};
        for (int i = 0; i < dec.order(); ++i)
            worst = std::max(worst, oracle::relative_error(dec.singular_values(i), ref[static_cast<std::size_t>(i)]));
    }
    const double t = seconds_since(start);
    return {worst < 1e-9 && t < 30.0, "worst relative error " + fmt(worst) + ", " + fmt(t, 3) + " s"};
}

Outcome weight_invariants() {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> exponent(-4.0, 4.0);
    double worst_musical = 0.0, worst_ev = 0.0, worst_mid = 0.0;
    bool endpoints = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const int m = 3 + static_cast<int>(rng() % 47);
        double lo = std::pow(10.0, exponent(rng)), hi = std::pow(10.0, exponent(rng));
        if (lo > hi) std::swap(lo, hi);
        if (lo == hi) hi *= 2.0;
        // random spectrum that also contains both soft bounds and their geometric mean
        std::vector<double> s{hi, std::sqrt(lo * hi), lo};
        while (static_cast<int>(s.size()) < m) s.push_back(std::pow(10.0, exponent(rng)));
        std::sort(s.begin(), s.end(), std::greater<>());
        const auto dec = from_sigmas(s);
        for (Scheme scheme : {Scheme::musical_hard, Scheme::ev_hard, Scheme::musical_soft, Scheme::ev_soft}) {
            const ThresholdSpec spec{scheme, ThresholdRule::manual, std::sqrt(lo * hi), lo, hi};
            const auto w = weights(dec, spec);
            for (int i = 0; i < m; ++i) {
                const auto k = static_cast<std::size_t>(i);
                if (w.a[k] < 0.0 || w.b[k] < 0.0) return {false, "negative weight"};
                if (is_ev(scheme)) {
                    const double inv = 1.0 / dec.eigenvalues(i);
                    worst_ev = std::max(worst_ev, std::abs(w.a[k] + w.b[k] - inv) / inv);
                } else {
                    worst_musical = std::max(worst_musical, std::abs(w.a[k] + w.b[k] - 1.0));
                }
                if (scheme == Scheme::musical_soft) {
                    if (s[k] == hi) endpoints &= w.a[k] == 1.0;
                    if (s[k] == lo) endpoints &= w.a[k] == 0.0;
                    if (s[k] == std::sqrt(lo * hi)) worst_mid = std::max(worst_mid, std::abs(w.a[k] - 0.5));
                }
            }
        }
        endpoints &= soft_ramp(hi, lo, hi) == 1.0 && soft_ramp(lo, lo, hi) == 0.0;
        worst_mid = std::max(worst_mid, std::abs(soft_ramp(std::sqrt(lo * hi), lo, hi) - 0.5));
    }
    const bool pass = worst_musical <= 1e-12 && worst_ev <= 1e-12 && worst_mid <= 1e-12 && endpoints;
    return {pass, "max |a+b-1| " + fmt(worst_musical) + ", max rel |a+b-1/lambda| " + fmt(worst_ev) +
                      ", endpoints exact " + (endpoints ? "yes" : "no") + ", midpoint error " + fmt(worst_mid)};
}

Outcome resolution_reproduction() {
    std::vector<double> musical_b, reference;
    bool all_resolved = true;
    for (int seed = 1; seed <= kSeeds; ++seed) {
        const auto sim = simulate_scene(SceneKind::lines_crossing, static_cast<std::uint64_t>(seed));
        const auto geom = CrossingLinesGeometry::from_params(sim.scene.params);
        const auto rb = resolution(run(sim.stack, "musical", "B"), geom);
        const auto rm = resolution(mean_image_reference(sim.stack, 10), geom);
        all_resolved &= rb.separation_nm.has_value() && rm.separation_nm.has_value();
        musical_b.push_back(rb.separation_nm.value_or(NAN));
        reference.push_back(rm.separation_nm.value_or(NAN));
    }
    const double mb = mean(musical_b), mr = mean(reference);
    const bool pass = all_resolved && mb <= 150.0 && std::abs(mr - 285.0) <= 0.15 * 285.0;
    return {pass, "MUSICAL B mean " + fmt(mb) + " nm [" + join(musical_b) + "], mean image " + fmt(mr) + " nm [" +
                      join(reference) + "]"};
}

Outcome contrast_trends() {
    const std::vector<double> duties{0.01, 0.05, 0.25, 0.5};
    std::vector<double> hard, soft;
    for (double duty : duties) {
        std::vector<double> ch, cs;
        for (int seed = 1; seed <= kSeeds; ++seed) {
            const auto sim = simulate_scene(SceneKind::two_circles, static_cast<std::uint64_t>(seed), kWorkers, duty);
            const auto geom = TwoCirclesGeometry::from_params(sim.scene.params);
            const WindowAnalysis analysis(sim.stack, 7, kWorkers);
            ch.push_back(contrast(reconstruct(analysis, variant_config("musical", "A")), geom));
            cs.push_back(contrast(reconstruct(analysis, variant_config("musical", "soft")), geom));
        }
        hard.push_back(mean(ch));
        soft.push_back(mean(cs));
    }
    const double spread = *std::max_element(soft.begin(), soft.end()) - *std::min_element(soft.begin(), soft.end());
    const bool pass = hard[3] < hard[1] && spread < 0.15;
    return {pass, "duty 1/5/25/50%: MUSICAL A [" + join(hard) + "], MUSICAL-S [" + join(soft) + "] spread " +
                      fmt(spread)};
}

struct HollowProbe {
    double x = 0.0, y = 0.0, radius = 0.0;

    double ratio(const Reconstruction& r) const {
        return annulus_mean(r, x, y, 0.0, 0.35 * radius) / annulus_mean(r, x, y, 0.75 * radius, 1.15 * radius);
    }
};

HollowProbe largest_vesicle(const Scene& scene) {
    HollowProbe p;
    for (int k = 0; k < static_cast<int>(scene.params.at("count")); ++k) {
        const std::string key = "vesicle" + std::to_string(k) + "_";
        if (scene.params.at(key + "diameter_nm") == 300.0)
            p = {scene.params.at(key + "x_nm"), scene.params.at(key + "y_nm"), 150.0};
    }
    return p;
}

const std::vector<std::pair<std::string, std::string>> kVariants{
    {"musical", "A"}, {"musical", "B"}, {"musical", "soft"}, {"ev", "A"}, {"ev", "B"}, {"ev", "soft"}};

Outcome out_of_focus_rejection() {
    const auto sim = simulate_scene(SceneKind::vesicles, 1);
    const HollowProbe probe = largest_vesicle(sim.scene);
    if (probe.radius == 0.0) return {false, "no 300 nm vesicle in the scene"};
    const WindowAnalysis analysis(sim.stack, 7, kWorkers);
    bool pass = true;
    std::string detail = "center/rim:";
    for (const auto& [method, threshold] : kVariants) {
        const auto r = reconstruct(analysis, variant_config(method, threshold));
        const double q = probe.ratio(r);
        pass &= q < 0.5;
        detail += " " + r.config.variant.name() + " " + fmt(q, 3) + ";";
    }
    const double qm = probe.ratio(mean_image_reference(sim.stack, 10));
    pass &= qm >= 0.9;
    return {pass, detail + " mean image " + fmt(qm, 3)};
}

double worst_pixel_difference(const Image& a, const Image& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, oracle::relative_error(a.data[i], b.data[i]));
    return worst;
}

Outcome soft_scale_invariance() {
    const auto sim = simulate_scene(SceneKind::two_circles, 1);
    const ImageStack scaled = sim.stack.scaled(10.0);
    double worst = 0.0;
    for (const char* method : {"musical", "ev"})
        worst = std::max(worst, worst_pixel_difference(run(sim.stack, method, "soft").image,
                                                       run(scaled, method, "soft").image));
    return {worst < 1e-6, "worst pixel relative difference " + fmt(worst)};
}

Outcome cardinality_monotonicity() {
    std::size_t violations = 0, pixels = 0;
    for (SceneKind kind : {SceneKind::lines_crossing, SceneKind::two_circles, SceneKind::vesicles,
                           SceneKind::microtubules_debris, SceneKind::mitochondria}) {
        for (std::uint64_t seed : {1, 2}) {
            const auto sim = simulate_scene(kind, seed);
            const auto a = cardinality_map(sim.stack, variant_config("musical", "A"));
            const auto b = cardinality_map(sim.stack, variant_config("musical", "B"));
            for (std::size_t i = 0; i < a.counts.size(); ++i) violations += b.counts[i] > a.counts[i];
            pixels += a.counts.size();
        }
    }
    return {violations == 0, std::to_string(violations) + " of " + std::to_string(pixels) +
                                 " pixels with B > A over 5 scenes x 2 seeds"};
}

Outcome dynamic_range_ordering() {
    std::vector<double> ev, mu;
    for (int seed = 1; seed <= kSeeds; ++seed) {
        const auto sim = simulate_scene(SceneKind::microtubules_debris, static_cast<std::uint64_t>(seed));
        const WindowAnalysis analysis(sim.stack, 7, kWorkers);
        ev.push_back(intensity_mass(reconstruct(analysis, variant_config("ev", "A")), 0.01, 0.5));
        mu.push_back(intensity_mass(reconstruct(analysis, variant_config("musical", "A")), 0.01, 0.5));
    }
    return {mean(ev) > mean(mu), "mass in (0.01, 0.5]: EV A mean " + fmt(mean(ev)) + " [" + join(ev) +
                                     "], MUSICAL A mean " + fmt(mean(mu)) + " [" + join(mu) + "]"};
}

bool same_image(const Image& a, const Image& b) {
    return a.rows == b.rows && a.cols == b.cols && std::equal(a.data.begin(), a.data.end(), b.data.begin(),
                                                              [](double x, double y) {
                                                                  return std::memcmp(&x, &y, sizeof x) == 0;
                                                              });
}

Outcome determinism() {
    const int many = 4;
    std::vector<std::string> broken;
    auto check = [&](const std::string& what, bool ok) {
        if (!ok) broken.push_back(what);
    };
    auto pair_of = [&](SceneKind kind, double duty = 0.05) {
        const auto one = simulate_scene(kind, 1, 1, duty);
        const auto four = simulate_scene(kind, 1, many, duty);
        check(to_string(kind) + " stack",
              std::equal(one.stack.samples().begin(), one.stack.samples().end(), four.stack.samples().begin()));
        return one;
    };
    auto recon_pair = [&](const std::string& tag, const ImageStack& st, const std::string& method,
                          const std::string& threshold) {
        const auto r1 = run(st, method, threshold, 1);
        const auto rn = run(st, method, threshold, many);
        check(tag + " " + r1.config.variant.name(), same_image(r1.image, rn.image));
        return std::pair{r1, rn};
    };

    {  // 4
        const auto sim = pair_of(SceneKind::lines_crossing);
        const auto geom = CrossingLinesGeometry::from_params(sim.scene.params);
        const auto [r1, rn] = recon_pair("lines", sim.stack, "musical", "B");
        check("lines resolution", resolution(r1, geom).separation_nm == resolution(rn, geom).separation_nm);
    }
    {  // 5
        const auto sim = pair_of(SceneKind::two_circles, 0.5);
        const auto geom = TwoCirclesGeometry::from_params(sim.scene.params);
        for (const char* t : {"A", "soft"}) {
            const auto [r1, rn] = recon_pair("circles", sim.stack, "musical", t);
            check("circles contrast", contrast(r1, geom) == contrast(rn, geom));
        }
    }
    {  // 6
        const auto sim = pair_of(SceneKind::vesicles);
        for (const auto& [method, threshold] : kVariants) recon_pair("vesicles", sim.stack, method, threshold);
    }
    {  // 7
        const auto sim = simulate_scene(SceneKind::two_circles, 1, many);
        const ImageStack scaled = sim.stack.scaled(10.0);
        for (const char* method : {"musical", "ev"}) recon_pair("scaled circles", scaled, method, "soft");
    }
    {  // 8, 9
        const auto sim = pair_of(SceneKind::microtubules_debris);
        for (const char* t : {"A", "B"}) {
            const auto c1 = cardinality_map(sim.stack, variant_config("musical", t, 1));
            const auto cn = cardinality_map(sim.stack, variant_config("musical", t, many));
            check(std::string("cardinality ") + t, c1.counts == cn.counts);
        }
        for (const char* method : {"musical", "ev"}) {
            const auto [r1, rn] = recon_pair("microtubules", sim.stack, method, "A");
            check("histogram mass", intensity_mass(r1, 0.01, 0.5) == intensity_mass(rn, 0.01, 0.5));
        }
    }
    std::string detail = "threads 1 vs " + std::to_string(many) + ": ";
    if (broken.empty()) return {true, detail + "all stacks, reconstructions and metrics bit-identical"};
    detail += "differences in";
    for (const auto& b : broken) detail += " [" + b + "]";
    return {false, detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"hard-scheme oracle equivalence", hard_oracle},
        {"decomposition oracle", decomposition_oracle},
        {"weight-family invariants", weight_invariants},
        {"resolution on crossing lines", resolution_reproduction},
        {"contrast trends over duty cycle", contrast_trends},
        {"out-of-focus rejection on vesicles", out_of_focus_rejection},
        {"soft-scheme scale invariance", soft_scale_invariance},
        {"cardinality monotonicity", cardinality_monotonicity},
        {"dynamic-range ordering", dynamic_range_ordering},
        {"thread-count determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), seconds_since(start));
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
