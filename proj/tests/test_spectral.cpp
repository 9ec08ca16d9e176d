#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "cascade/analytic_equal.hpp"
#include "cascade/spectral.hpp"
#include "support/oracles.hpp"

using namespace cascade;

namespace {

std::vector<double> log_uniform_rates(std::mt19937_64& rng, int n, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    std::vector<double> r(n);
    for (auto& v : r) v = std::exp(u(rng));
    return r;
}

}  // namespace

TEST_CASE("generator structure") {
    const CascadeSpec spec{4, {1.0, 2.0, 3.0, 4.0}};
    const auto q = generator_matrix(spec);
    for (int c = 0; c < 4; ++c) {
        CHECK(std::abs(q.col(c).sum()) < 1e-15);
        int positives = 0;
        for (int r = 0; r < 4; ++r) {
            if (r != c) CHECK(q(r, c) >= 0.0);
            if (q(r, c) > 0.0) ++positives;
        }
        CHECK(positives == 1);
        CHECK(q(c, c) == -spec.rates[c]);
        CHECK(q(wrap(c - 1, 4), c) == spec.rates[c]);
    }
}

TEST_CASE("steady state") {
    for (int n = 1; n <= 9; ++n) {
        const auto p = steady_state(CascadeSpec::equal(n, 2.5));
        for (double v : p) CHECK(v == doctest::Approx(1.0 / n).epsilon(1e-14));
    }
    const auto p3 = steady_state(CascadeSpec{3, {1.0, 2.0, 4.0}});
    CHECK(p3[0] == doctest::Approx(4.0 / 7.0).epsilon(1e-14));
    CHECK(p3[1] == doctest::Approx(2.0 / 7.0).epsilon(1e-14));
    CHECK(p3[2] == doctest::Approx(1.0 / 7.0).epsilon(1e-14));

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 10;
        const CascadeSpec spec{n, log_uniform_rates(rng, n, 1e-2, 1e2)};
        const auto p = steady_state(spec);
        const double c = cycle_current(spec);
        double sum = 0.0;
        for (int l = 0; l < n; ++l) {
            sum += p[l];
            CHECK(std::abs(spec.rates[l] * p[l] - c) / c <= 1e-10);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
        const Eigen::Map<const Eigen::VectorXd> pv(p.data(), n);
        CHECK((generator_matrix(spec) * pv).cwiseAbs().maxCoeff() <= 1e-12 * spec.max_rate());
        const auto ref = oracle::stationary(spec.rates);
        for (int l = 0; l < n; ++l) CHECK(p[l] == doctest::Approx(static_cast<double>(ref[l])).epsilon(1e-9));
    }
}

TEST_CASE("equal-rate eigenvalues lie on the shifted circle") {
    for (int n = 1; n <= 32; ++n) {
        const double gamma = 0.7;
        const auto d = decompose(CascadeSpec::equal(n, gamma));
        std::vector<bool> used(n, false);
        for (int j = 0; j < n; ++j) {
            const std::complex<double> target = -gamma * (1.0 - std::polar(1.0, 2.0 * M_PI * j / n));
            double best = 1e300;
            int at = -1;
            for (int i = 0; i < n; ++i) {
                if (used[i]) continue;
                const double dist = std::abs(d.eigenvalues(i) - target);
                if (dist < best) {
                    best = dist;
                    at = i;
                }
            }
            used[at] = true;
            CHECK(best <= 1e-10 * std::max(1.0, std::abs(target)));
        }
        for (int i = 0; i < n; ++i) CHECK(d.eigenvalues(i).real() <= 1e-10 * gamma);
    }
    const auto d4 = decompose(CascadeSpec::equal(4, 1.0));
    std::vector<std::complex<double>> ev(d4.eigenvalues.data(), d4.eigenvalues.data() + 4);
    for (auto target : {std::complex<double>(0, 0), std::complex<double>(-1, 1), std::complex<double>(-2, 0),
                        std::complex<double>(-1, -1)}) {
        CHECK(std::any_of(ev.begin(), ev.end(), [&](auto v) { return std::abs(v - target) < 1e-12; }));
    }
    const auto d2 = decompose(CascadeSpec{2, {1.5, 2.0}});
    const double lo = std::min(d2.eigenvalues(0).real(), d2.eigenvalues(1).real());
    const double hi = std::max(d2.eigenvalues(0).real(), d2.eigenvalues(1).real());
    CHECK(hi == 0.0);
    CHECK(lo == doctest::Approx(-3.5).epsilon(1e-14));
    CHECK(decompose(CascadeSpec{1, {3.0}}).eigenvalues(0) == std::complex<double>(0.0, 0.0));
}

TEST_CASE("characteristic residual stays small") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + trial % 8;
        const auto d = decompose(CascadeSpec{n, log_uniform_rates(rng, n, 1e-2, 1e2)});
        CHECK(d.characteristic_residual <= 1e-8);
    }
}

TEST_CASE("propagation") {
    const auto spec = CascadeSpec::equal(3, 1.0);
    const auto p0 = propagate(spec, 2, 0.0);
    CHECK(p0 == std::vector<double>{0.0, 0.0, 1.0});
    const auto p1 = propagate(spec, 2, 1.0);
    CHECK(p1[1] == doctest::Approx((1.0 + 2.0 * std::exp(-1.5) * std::cos(std::sqrt(3.0) / 2.0 - 2.0 * M_PI / 3.0)) / 3.0)
                       .epsilon(1e-12));
    CHECK(p1[1] == doctest::Approx(0.3833).epsilon(1e-3));

    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + trial % 7;
        const CascadeSpec spec_r{n, log_uniform_rates(rng, n, 1e-2, 1e2)};
        const Propagator prop(spec_r);
        const int start = static_cast<int>(u(rng) * n);
        const double tau = u(rng) * 20.0 / spec_r.mean_rate();
        const auto p = prop.propagate(start, tau);
        const auto ref = oracle::expm(oracle::generator(spec_r.rates), tau);
        double sum = 0.0;
        for (int l = 0; l < n; ++l) {
            sum += p[l];
            CHECK(p[l] >= 0.0);
            CHECK(p[l] <= 1.0);
            CHECK(std::abs(p[l] - static_cast<double>(ref[l][start])) <= 1e-9);
        }
        CHECK(std::abs(sum - 1.0) <= 1e-10);
        double slowest = spec_r.rates[0];
        for (double r : spec_r.rates) slowest = std::min(slowest, r);
        const auto far = prop.propagate(start, 200.0 / slowest * 5.0);
        const auto ss = steady_state(spec_r);
        for (int l = 0; l < n; ++l) CHECK(std::abs(far[l] - ss[l]) <= 1e-8);
    }
}

TEST_CASE("g2_general matches the closed form and the oracle") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n = 1; n <= 12; ++n) {
        const Propagator prop(CascadeSpec::equal(n, 1.0));
        for (int i = 0; i < 20; ++i) {
            const int m = static_cast<int>((u(rng) + 1.0) / 2.0 * n) % n;
            const int l = static_cast<int>((u(rng) + 1.0) / 2.0 * n) % n;
            const double tau = u(rng) * 10.0 * n;
            CHECK(std::abs(prop.g2(m, l, tau) - g2_equal_pair(n, m, l, 1.0, tau)) <= 1e-10);
        }
    }
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 6;
        const CascadeSpec spec{n, log_uniform_rates(rng, n, 0.1, 10.0)};
        const Propagator prop(spec);
        for (int i = 0; i < 5; ++i) {
            const int m = static_cast<int>((u(rng) + 1.0) / 2.0 * n) % n;
            const int l = static_cast<int>((u(rng) + 1.0) / 2.0 * n) % n;
            const double tau = u(rng) * 10.0;
            const double ref = static_cast<double>(oracle::g2(spec.rates, m, l, tau));
            CHECK(prop.g2(m, l, tau) == doctest::Approx(ref).epsilon(1e-8).scale(1.0));
        }
    }
}

TEST_CASE("degenerate rate sets fall back to the dense path") {
    // Two eigenvalues coincide at the N = 3 boundary (zeta = 0).
    const CascadeSpec boundary{3, {1.0, 1.0, 4.0}};
    const Propagator prop(boundary);
    CHECK(prop.decomposition().degenerate);
    CHECK_FALSE(prop.spectral());
    for (double tau : {0.1, 0.7, 2.0, 9.0}) {
        const auto p = prop.propagate(0, tau);
        const auto ref = oracle::expm(oracle::generator(boundary.rates), tau);
        for (int l = 0; l < 3; ++l) CHECK(std::abs(p[l] - static_cast<double>(ref[l][0])) <= 1e-10);
    }
    CHECK(Propagator(CascadeSpec{3, {1.0, 2.0, 4.0}}).spectral());
}

TEST_CASE("invalid inputs") {
    CHECK_THROWS_AS(Propagator(CascadeSpec{2, {1.0, -1.0}}), CascadeError);
    const Propagator prop(CascadeSpec::equal(3, 1.0));
    CHECK_THROWS_AS(prop.propagate(3, 1.0), CascadeError);
    CHECK_THROWS_AS(prop.propagate(0, -1.0), CascadeError);
    CHECK_THROWS_AS(prop.g2(0, 5, 1.0), CascadeError);
}
