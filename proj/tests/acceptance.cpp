#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "cascade/analysis.hpp"
#include "cascade/analytic_equal.hpp"
#include "cascade/estimator.hpp"
#include "cascade/spectral.hpp"
#include "cascade/stochastic.hpp"
#include "cascade/three_level.hpp"
#include "cli.hpp"

using namespace cascade;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), format, a, b, c);
    return buf;
}

Outcome boundary_values() {
    double worst = 0.0;
    for (int n = 2; n <= 12; ++n) {
        worst = std::max(worst, std::abs(g2_equal(n, 0, 1.0, 0.0) - n));
        for (int k = 1; k < n; ++k) worst = std::max(worst, std::abs(g2_equal(n, k, 1.0, 0.0)));
    }
    return {worst <= 1e-10, fmt("max deviation %.3g", worst)};
}

Outcome closed_form_vs_spectral() {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int n = 1; n <= 12; ++n) {
        for (double gamma : {1.0, 0.37}) {
            const Propagator prop(CascadeSpec::equal(n, gamma));
            for (int i = 0; i < 100; ++i) {
                const int m = static_cast<int>(u(rng) * n);
                const int l = static_cast<int>(u(rng) * n);
                const double tau = (2.0 * u(rng) - 1.0) * 10.0 * n / gamma;
                worst = std::max(worst, std::abs(g2_equal_pair(n, m, l, gamma, tau) - prop.g2(m, l, tau)));
            }
        }
    }
    return {worst <= 1e-10, fmt("max abs error %.3g", worst)};
}

Outcome three_level_vs_propagation() {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> lr(std::log(1e-2), std::log(1e2));
    std::uniform_real_distribution<double> ut(-10.0, 10.0);
    double worst = 0.0;
    bool exact = true;
    for (int trial = 0; trial < 100; ++trial) {
        const double a = std::exp(lr(rng)), b = std::exp(lr(rng)), c = std::exp(lr(rng));
        const CascadeSpec spec{3, {a, b, c}};
        const auto named = ThreeLevelRates::from_spec(spec);
        const Propagator prop(spec);
        const double tau = ut(rng) / spec.mean_rate();
        for (int m = 0; m < 3; ++m)
            for (int n = 0; n < 3; ++n)
                worst = std::max(worst, std::abs(g2_three_level(named, m, n, tau) - prop.g2(m, n, tau)));
        // g10 and g02 are g21 of the rotated rate sets; the reverse orders mirror tau.
        const auto rot10 = ThreeLevelRates::from_spec(CascadeSpec{3, {c, a, b}});
        const auto rot02 = ThreeLevelRates::from_spec(CascadeSpec{3, {b, c, a}});
        exact = exact && g2_three_level(named, 1, 0, tau) == g2_three_level(rot10, 2, 1, tau);
        exact = exact && g2_three_level(named, 0, 2, tau) == g2_three_level(rot02, 2, 1, tau);
        exact = exact && g2_three_level(named, 1, 2, tau) == g2_three_level(named, 2, 1, -tau);
        exact = exact && g2_three_level(named, 0, 1, tau) == g2_three_level(named, 1, 0, -tau);
        exact = exact && g2_three_level(named, 2, 0, tau) == g2_three_level(named, 0, 2, -tau);
    }
    return {worst <= 1e-8 && exact,
            fmt("max abs error %.3g, rotations/mirror exact: %s", worst) + (exact ? "yes" : "no")};
}

Outcome peak_magnitudes() {
    const double p6 = find_peaks(6, 1.0, 1, 1).peaks.at(0).g2;
    const double p13 = find_peaks(13, 1.0, 1, 2).peaks.at(1).g2;
    const auto r50 = find_peaks(50, 1.0, 1, 8);
    const double p50_7 = r50.peaks.at(6).g2, p50_8 = r50.peaks.at(7).g2;
    const bool ok = std::abs(p6 - 1.10) <= 0.03 && std::abs(p13 - 1.10) <= 0.03 && std::abs(p50_7 - 1.13) <= 0.03 &&
                    std::abs(p50_8 - 1.09) <= 0.03;
    return {ok, fmt("N=6 #1 %.4f, N=13 #2 %.4f, ", p6, p13) + fmt("N=50 #7 %.4f #8 %.4f", p50_7, p50_8)};
}

Outcome bundle_value() {
    const double g = g2_subset(SubsetSpec({1, 2}, 50), 1.0, 0.0);
    const double b = bundle_peak(50, 2);
    return {std::abs(g - 12.5) <= 1e-10 && g == b, fmt("g2_subset %.17g, bundle_peak %.17g", g, b)};
}

Outcome three_level_discontinuity() {
    const ThreeLevelRates rates{1.0, 1.1, 0.025};
    const double expected = 1.0 + (1.0 / 1.0 + 1.0 / 1.1) * 0.025;
    const double left = g2_three_level(rates, 2, 1, -1e-6);
    const double right = g2_three_level(rates, 2, 1, 1e-6);
    const double left_general = g2_general(rates.to_spec(), 2, 1, -1e-6);
    const double right_general = g2_general(rates.to_spec(), 2, 1, 0.0);
    const auto jump = discontinuity(rates.to_spec(), 2, 1);
    const bool ok = left >= 0.0 && left <= 1e-4 && left_general <= 1e-4 && std::abs(right - expected) <= 1e-4 &&
                    std::abs(right_general - expected) <= 1e-4 && jump.left == 0.0 &&
                    std::abs(jump.right - expected) <= 1e-4;
    return {ok, fmt("left(-1e-6) %.3g, right(+1e-6) %.6f, expected %.6f", left, right, expected)};
}

Outcome oscillation() {
    bool ok = oscillation_condition(0.6, 0.6, 0.6) == Oscillation::Oscillatory &&
              oscillation_condition(1.0, 1.0, 4.0) == Oscillation::Boundary &&
              oscillation_condition(1.0, 1.0, 4.1) == Oscillation::Overdamped;
    for (const std::array<double, 3>& base : {std::array<double, 3>{1.0, 1.0, 1.0}, std::array<double, 3>{1.0, 1.0, 4.0},
                                               std::array<double, 3>{1.0, 1.0, 4.1}, std::array<double, 3>{0.3, 2.0, 5.0}}) {
        auto g = base;
        std::sort(g.begin(), g.end());
        const auto expected = oscillation_condition(g[0], g[1], g[2]);
        do {
            ok = ok && oscillation_condition(g[0], g[1], g[2]) == expected;
        } while (std::next_permutation(g.begin(), g.end()));
    }
    return {ok, "equal/boundary/overdamped classified, permutation invariant"};
}

struct McResult {
    ComparisonReport cmp;
    std::vector<double> occupancy_z;
};

McResult monte_carlo(const CascadeSpec& spec, std::uint64_t seed, const std::function<double(double)>& analytic,
                     const std::vector<double>& occupancy) {
    SimConfig cfg;
    cfg.spec = spec;
    cfg.seed = seed;
    cfg.stop = StopAtEvents{10'000'000};
    const EventStream stream = simulate(cfg);
    McResult r;
    r.cmp = compare_trace(correlate(stream, 1, 1, {0.05, 15.0}), analytic);
    const auto occ = occupancy_estimate(stream);
    for (std::size_t l = 0; l < occupancy.size(); ++l) {
        r.occupancy_z.push_back(std::abs(occ.fractions[l] - occupancy[l]) / occ.std_err[l]);
    }
    return r;
}

Outcome monte_carlo_equivalence() {
    const auto six = monte_carlo(CascadeSpec::equal(6, 1.0), 42, [](double t) { return g2_equal_pair(6, 1, 1, 1.0, t); },
                                 std::vector<double>(6, 1.0 / 6.0));
    const CascadeSpec spec3{3, {1.0, 2.0, 4.0}};
    const auto named = ThreeLevelRates::from_spec(spec3);
    const auto three = monte_carlo(spec3, 43, [&](double t) { return g2_three_level(named, 1, 1, t); },
                                   {4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0});
    const double z6 = *std::max_element(six.occupancy_z.begin(), six.occupancy_z.end());
    const double z3 = *std::max_element(three.occupancy_z.begin(), three.occupancy_z.end());
    const bool ok = six.cmp.fraction() >= 0.99 && three.cmp.fraction() >= 0.99 && z6 <= 3.0 && z3 <= 3.0;
    return {ok, fmt("N=6 bins within 3 sigma %.4f, occupancy max z %.2f; ", six.cmp.fraction(), z6) +
                    fmt("N=3 bins within 3 sigma %.4f, occupancy max z %.2f", three.cmp.fraction(), z3)};
}

Outcome stream_invariants() {
    std::mt19937_64 seeds(99);
    std::size_t violations = 0;
    for (int i = 0; i < 20; ++i) {
        SimConfig cfg;
        std::uniform_real_distribution<double> u(std::log(0.1), std::log(10.0));
        const int n = 2 + i % 9;
        cfg.spec = CascadeSpec{n, std::vector<double>(n)};
        for (auto& r : cfg.spec.rates) r = std::exp(u(seeds));
        cfg.seed = seeds();
        cfg.stop = StopAtEvents{1'000'000};
        const auto check = check_stream(simulate(cfg));
        violations += check.non_increasing + check.cycling_breaks + (check.count_spread > 1 ? 1 : 0);
    }
    return {violations == 0, fmt("violations %.0f over 20 seeds", static_cast<double>(violations))};
}

Outcome cauchy_schwarz() {
    std::vector<double> tau;
    for (int i = 1; i <= 20; ++i) tau.push_back(0.005 * i);
    tau.insert(tau.begin(), 1e-4);
    std::size_t checked = 0, failures = 0;
    for (int n : {3, 6, 10}) {
        const auto spec = CascadeSpec::equal(n, 1.0);
        for (int m = 0; m < n; ++m)
            for (int l = 0; l < n; ++l) {
                if (m == l) continue;
                const auto r = cs_check(spec, m, l, tau);
                checked += r.tau.size();
                for (bool v : r.violated) failures += v ? 0 : 1;
                if (r.lhs != 0.0 || !r.infinite_ratio) ++failures;
            }
    }
    return {failures == 0, fmt("%.0f samples, %.0f without violation", static_cast<double>(checked),
                               static_cast<double>(failures))};
}

Outcome small_tau_law() {
    bool ok = true;
    double lowest = 1.0;
    for (int n = 2; n <= 8; ++n)
        for (int k = 1; k < n; ++k) {
            const double r0 = g2_equal(n, k, 1.0, 0.1) / small_tau_leading(n, k, 1.0, 0.1);
            lowest = std::min(lowest, r0);
            ok = ok && r0 >= 0.85 && r0 <= 1.0;
            double prev = r0;
            for (int i = 1; i <= 40; ++i) {
                const double tau = 0.1 * std::pow(10.0, -i / 40.0);
                const double r = g2_equal(n, k, 1.0, tau) / small_tau_leading(n, k, 1.0, tau);
                ok = ok && r >= prev && r <= 1.0;
                prev = r;
            }
            ok = ok && std::abs(prev - 1.0) < std::abs(r0 - 1.0);
        }
    return {ok, fmt("lowest ratio at gamma tau = 0.1: %.4f", lowest)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

// Runs a fixed set of pipelines into `dir`; manifests carry wall-clock time
// and are left out of the comparison.
bool run_pipelines(const fs::path& dir) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ostringstream out, err;
    auto run = [&](std::vector<std::string> args) { return cli::run(args, out, err) == 0; };
    const std::string d = dir.string() + "/";
    {
        std::ofstream f(d + "rates.json");
        f << R"({"n_levels": 3, "rates": [1, 0.025, 1.1]})";
    }
    bool ok = run({"simulate", "--n", "6", "--gamma", "1", "--events", "1e6", "--seed", "42", "--out", d + "ev.txt"});
    ok = ok && run({"simulate", "--rate-list", "1,2,4", "--duration", "1e5", "--seed", "7", "--binary", "--out", d + "ev.bin"});
    ok = ok && run({"correlate", "--in", d + "ev.txt", "--pair", "1,1", "--bin", "0.05", "--taumax", "15", "--out", d + "c11.csv"});
    ok = ok && run({"correlate", "--in", d + "ev.bin", "--pair", "2,1", "--bin", "0.05", "--taumax", "10",
                    "--bootstrap", "20", "--out", d + "c21.csv"});
    ok = ok && run({"correlate", "--in", d + "ev.txt", "--subset", "1,2", "--bin", "0.1", "--taumax", "10", "--out", d + "s12.csv"});
    ok = ok && run({"analytic", "--n", "6", "--pair", "2,1", "--tau", "-8:8", "--steps", "1600", "--out", d + "a.csv"});
    ok = ok && run({"general", "--rates", d + "rates.json", "--pair", "2,1", "--tau", "-20:20", "--steps", "800", "--out", d + "g.csv"});
    ok = ok && run({"peaks", "--n", "50", "--k", "1", "--orders", "8", "--out", d + "p.json", "--csv", d + "p.csv"});
    ok = ok && run({"cscheck", "--n", "6", "--pair", "3,1", "--out", d + "cs.json"});
    ok = ok && run({"figure", "--preset", "fig2", "--out-dir", d + "fig"});
    ok = ok && run({"figure", "--preset", "fig5", "--out-dir", d + "fig"});
    return ok;
}

Outcome determinism() {
    const auto base = fs::temp_directory_path() / "cascade_acceptance";
    setenv("CASCADE_THREADS", "1", 1);
    const bool ok_a = run_pipelines(base / "a");
    setenv("CASCADE_THREADS", "4", 1);
    const bool ok_b = run_pipelines(base / "b");
    unsetenv("CASCADE_THREADS");
    std::size_t compared = 0, different = 0;
    for (const auto& entry : fs::recursive_directory_iterator(base / "a")) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().filename().string().find("manifest") != std::string::npos) continue;
        const auto rel = fs::relative(entry.path(), base / "a");
        ++compared;
        if (slurp(entry.path()) != slurp(base / "b" / rel)) ++different;
    }
    fs::remove_all(base);
    return {ok_a && ok_b && compared > 0 && different == 0,
            fmt("%.0f output files compared, %.0f differ", static_cast<double>(compared), static_cast<double>(different))};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"exact boundary values", boundary_values},
        {"closed form vs spectral", closed_form_vs_spectral},
        {"N=3 closed form vs propagation", three_level_vs_propagation},
        {"peak magnitudes", peak_magnitudes},
        {"bundle value", bundle_value},
        {"N=3 discontinuity", three_level_discontinuity},
        {"oscillation condition", oscillation},
        {"Monte Carlo equivalence", monte_carlo_equivalence},
        {"stream invariants", stream_invariants},
        {"Cauchy-Schwarz violation", cauchy_schwarz},
        {"small-tau law", small_tau_law},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
