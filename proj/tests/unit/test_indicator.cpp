#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "musical/indicator.hpp"

using namespace musical;

namespace {

SubspaceDecomposition with_sigmas(std::vector<double> sigmas) {
    SubspaceDecomposition d;
    const auto m = static_cast<Eigen::Index>(sigmas.size());
    d.eigenimages = Eigen::MatrixXd::Identity(m, m);
    d.singular_values.resize(m);
    d.eigenvalues.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        d.singular_values(i) = sigmas[static_cast<std::size_t>(i)];
        d.eigenvalues(i) = sigmas[static_cast<std::size_t>(i)] * sigmas[static_cast<std::size_t>(i)];
    }
    return d;
}

SubspaceDecomposition random_sigmas(std::mt19937_64& rng, int m) {
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<double> s(static_cast<std::size_t>(m));
    for (double& v : s) v = std::pow(10.0, u(rng));
    std::sort(s.begin(), s.end(), std::greater<>());
    return with_sigmas(s);
}

}  // namespace

TEST_CASE("second singular values, rules A and B, soft bounds") {
    const auto d1 = with_sigmas({3, 2, 1});
    const auto d2 = with_sigmas({5, 1, 0.5});
    const std::vector<SubspaceDecomposition> ws{d1, d2};
    CHECK(second_singular_values(ws) == std::vector<double>{2, 1});
    CHECK(second_singular_values(std::span(ws).first(1)) == std::vector<double>{2});
    const std::vector<SubspaceDecomposition> thin{with_sigmas({1})};
    CHECK_THROWS_AS(second_singular_values(thin), Error);

    CHECK(rule_a(std::vector<double>{2.0, 1.0, 3.5}) == 1.0);
    CHECK(rule_a(std::vector<double>{4.0}) == 4.0);
    CHECK(rule_b(std::vector<double>{1.0, 3.0}) == 2.0);
    CHECK(rule_b(std::vector<double>{5.0, 5.0, 5.0}) == 5.0);
    CHECK_THROWS_AS(rule_a(std::vector<double>{}), Error);
    CHECK_THROWS_AS(rule_b(std::vector<double>{}), Error);

    CHECK(auto_soft_bounds(std::vector<double>{1.0, 2.0, 3.0}) == std::pair<double, double>{1.0, 3.0});
    CHECK_THROWS_WITH(auto_soft_bounds(std::vector<double>{2.0, 2.0}), "degenerate soft bounds");

    std::mt19937_64 rng(100);
    std::vector<SubspaceDecomposition> many;
    for (int k = 0; k < 100; ++k) many.push_back(random_sigmas(rng, 2 + static_cast<int>(rng() % 10)));
    const auto s2 = second_singular_values(many);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t k = 0; k < many.size(); ++k) {
        std::vector<double> sorted(many[k].singular_values.data(),
                                   many[k].singular_values.data() + many[k].singular_values.size());
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        CHECK(s2[k] == sorted[1]);
        lo = std::min(lo, sorted[1]);
        hi = std::max(hi, sorted[1]);
    }
    CHECK(rule_a(s2) == lo);
    CHECK(rule_b(s2) == (lo + hi) / 2);
    CHECK(auto_soft_bounds(s2) == std::pair<double, double>{lo, hi});
}

TEST_CASE("weight examples") {
    ThresholdSpec soft{Scheme::musical_soft, ThresholdRule::b, 0.0, 0.1, 10.0};
    const auto w = weights(with_sigmas({10.0, 1.0, 0.1}), soft);
    CHECK(w.a[0] == 1.0);
    CHECK(w.b[0] == 0.0);
    CHECK(w.a[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(w.a[2] == 0.0);
    CHECK(w.b[2] == 1.0);

    ThresholdSpec ev{Scheme::ev_hard, ThresholdRule::manual, 1.5};
    const auto we = weights(with_sigmas({2.0, 1.0}), ev);
    CHECK(we.a[0] == 0.25);
    CHECK(we.b[0] == 0.0);
    CHECK(we.a[1] == 0.0);
    CHECK(we.b[1] == 1.0);

    const auto wz = weights(with_sigmas({2.0, 0.0}), ev);
    CHECK(wz.a[1] == 0.0);
    CHECK(wz.b[1] == 0.0);

    ThresholdSpec tie{Scheme::musical_hard, ThresholdRule::manual, 1.0};
    CHECK(weights(with_sigmas({2.0, 1.0, 0.5}), tie).a == std::vector<double>{1, 1, 0});

    CHECK_THROWS_AS(weights(with_sigmas({2.0, 1.0}), ThresholdSpec{Scheme::musical_hard, ThresholdRule::b, 0.0}),
                    Error);
    CHECK_THROWS_WITH(weights(with_sigmas({2.0, 1.0}), ThresholdSpec{Scheme::ev_soft, ThresholdRule::b, 0, 2, 2}),
                      "degenerate soft bounds");
}

TEST_CASE("weight family invariants on random decompositions") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 300; ++trial) {
        const auto dec = random_sigmas(rng, 2 + static_cast<int>(rng() % 48));
        double lo = std::pow(10.0, u(rng)), hi = std::pow(10.0, u(rng));
        if (lo > hi) std::swap(lo, hi);
        if (lo == hi) continue;
        for (Scheme s : {Scheme::musical_hard, Scheme::ev_hard, Scheme::musical_soft, Scheme::ev_soft}) {
            const ThresholdSpec spec{s, ThresholdRule::manual, std::sqrt(lo * hi), lo, hi};
            const auto w = weights(dec, spec);
            double previous_share = 2.0;
            for (int i = 0; i < dec.order(); ++i) {
                const auto k = static_cast<std::size_t>(i);
                CHECK(w.a[k] >= 0.0);
                CHECK(w.b[k] >= 0.0);
                const double lambda = dec.eigenvalues(i);
                if (is_ev(s))
                    CHECK(std::abs(w.a[k] + w.b[k] - 1.0 / lambda) <= 1e-9 / lambda);
                else
                    CHECK(std::abs(w.a[k] + w.b[k] - 1.0) <= 1e-12);
                const double share = is_ev(s) ? w.a[k] * lambda : w.a[k];
                CHECK(share <= previous_share + 1e-12);
                previous_share = share;
            }
        }
    }
}

TEST_CASE("raising sigma0 never grows the signal subspace") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const auto dec = random_sigmas(rng, 20);
        int prev = dec.order();
        for (double e = -4; e <= 4; e += 0.25) {
            const int n = signal_cardinality(dec, std::pow(10.0, e));
            CHECK(n <= prev);
            prev = n;
        }
    }
}

TEST_CASE("hard weights reproduce the direct norm-ratio indicator") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    IndicatorConfig cfg;
    int compared = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const int m = 2 + static_cast<int>(rng() % 48);
        const auto dec = random_sigmas(rng, m);
        std::vector<double> g(static_cast<std::size_t>(m));
        for (double& v : g) v = u(rng);
        std::vector<double> s(dec.singular_values.data(), dec.singular_values.data() + m);
        const double sigma0 = s[static_cast<std::size_t>(rng() % static_cast<unsigned>(m))];
        double noise = 0.0;
        for (int i = 0; i < m; ++i)
            if (s[static_cast<std::size_t>(i)] < sigma0) noise += g[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(i)];
        if (noise <= 1e-6) continue;
        cfg.alpha = 0.5 + 4.0 * u(rng);
        const auto w = weights(dec, ThresholdSpec{Scheme::musical_hard, ThresholdRule::manual, sigma0});
        CHECK(oracle::relative_error(indicator_value(g, w, cfg), oracle::hard_indicator(g, s, sigma0, cfg.alpha)) <
              1e-9);
        ++compared;
    }
    CHECK(compared > 300);
}

TEST_CASE("indicator guard and exponent") {
    IndicatorConfig cfg;
    const std::vector<double> g{0.6, 0.8};
    const WeightVector all_signal{{1, 1}, {0, 0}};
    const double f = indicator_value(g, all_signal, cfg);
    CHECK(std::isfinite(f));
    CHECK(f > 1e20);
    cfg.alpha = 0.0;
    CHECK(indicator_value(g, WeightVector{{1, 0}, {0, 1}}, cfg) == 1.0);
    CHECK_THROWS_AS(indicator_value(g, WeightVector{{1}, {0}}, cfg), Error);
    CHECK_THROWS_AS((IndicatorConfig{-1.0, 1e-12}.validate()), Error);
}

TEST_CASE("soft indicator is invariant to a global intensity scale") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    IndicatorConfig cfg;
    for (int trial = 0; trial < 200; ++trial) {
        const auto dec = random_sigmas(rng, 10);
        std::vector<double> s(dec.singular_values.data(), dec.singular_values.data() + 10);
        std::vector<double> g(10);
        for (double& v : g) v = u(rng);
        const double c = 0.5 + 20 * u(rng);
        std::vector<double> cs = s;
        for (double& v : cs) v *= c;
        const auto scaled = with_sigmas(cs);
        for (Scheme sch : {Scheme::musical_soft, Scheme::ev_soft}) {
            const ThresholdSpec a{sch, ThresholdRule::b, 0, s[8], s[1]};
            const ThresholdSpec b{sch, ThresholdRule::b, 0, c * s[8], c * s[1]};
            CHECK(oracle::relative_error(indicator_value(g, weights(dec, a), cfg),
                                         indicator_value(g, weights(scaled, b), cfg)) < 1e-9);
        }
    }
}

TEST_CASE("indicator ordering does not depend on alpha") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto dec = random_sigmas(rng, 12);
        const auto w = weights(dec, ThresholdSpec{Scheme::musical_soft, ThresholdRule::b, 0,
                                                  dec.singular_values(9), dec.singular_values(1)});
        std::vector<double> g1(12), g2(12);
        for (double& v : g1) v = u(rng);
        for (double& v : g2) v = u(rng);
        IndicatorConfig c1, c2;
        c1.alpha = 1.0;
        c2.alpha = 4.0;
        CHECK((indicator_value(g1, w, c1) < indicator_value(g2, w, c1)) ==
              (indicator_value(g1, w, c2) < indicator_value(g2, w, c2)));
    }
}
