#include "cascade/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cascade/analytic_equal.hpp"
#include "cascade/format.hpp"
#include "cascade/parallel.hpp"
#include "cascade/spectral.hpp"

namespace cascade {

namespace {

constexpr double kGrid = 0.01;
constexpr double kRefine = 1e-4;
constexpr double kNoiseFloor = 1e-10;

// Upper bound on |g - 1| beyond tau: the slowest root decays at 1 - cos(2 pi / N).
double tail_bound(int n_levels, double x) {
    const double slowest = 1.0 - std::cos(2.0 * M_PI / n_levels);
    return (n_levels - 1) * std::exp(-x * slowest);
}

double golden_max(const std::function<double(double)>& f, double a, double b, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

std::vector<Peak> scan_peaks(int n_levels, double gamma, int k, int max_order) {
    std::vector<Peak> out;
    if (n_levels < 2 || max_order < 1) return out;
    auto excess = [&](double tau) { return g2_equal_excess(n_levels, k, gamma, tau); };
    const double h = kGrid / gamma;
    double f_prev = excess(0.0);
    double f_cur = excess(h);
    for (long i = 1;; ++i) {
        const double tau = static_cast<double>(i) * h;
        const double f_next = excess(tau + h);
        if (f_cur > f_prev && f_next <= f_cur) {
            const double at = golden_max(excess, tau - h, tau + h, kRefine / gamma);
            const double value = excess(at);
            if (value > kNoiseFloor) {
                out.push_back({static_cast<int>(out.size()) + 1, at, 1.0 + value});
                if (static_cast<int>(out.size()) == max_order) break;
            }
        }
        if (tail_bound(n_levels, gamma * tau) < kNoiseFloor) break;
        f_prev = f_cur;
        f_cur = f_next;
    }
    return out;
}

void require_levels(int n_levels) {
    if (n_levels < 1) throw CascadeError(ErrorKind::ZeroLevels, "number of levels must be >= 1");
}

void require_gamma(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw CascadeError(ErrorKind::NonPositiveRate, "gamma must be positive and finite");
    }
}

}  // namespace

PeakReport find_peaks(int n_levels, double gamma, int k, int max_order) {
    require_levels(n_levels);
    require_gamma(gamma);
    if (k < 0 || k >= n_levels) throw CascadeError(ErrorKind::KOutOfRange, "k must lie in [0, N)");
    PeakReport report;
    report.n_levels = n_levels;
    report.gamma = gamma;
    report.k = k;
    report.peaks = scan_peaks(n_levels, gamma, k, max_order);
    if (report.peaks.empty()) {
        throw CascadeError(ErrorKind::NoPeaksFound, "no maximum above 1 for N=" + std::to_string(n_levels));
    }
    return report;
}

PeakReport find_peaks_cross(int n_levels, double gamma, int max_order) {
    require_levels(n_levels);
    require_gamma(gamma);
    PeakReport report;
    report.n_levels = n_levels;
    report.gamma = gamma;
    report.cross = true;
    report.k = wrap((n_levels + 3) / 2, n_levels);
    report.mirror_k = wrap(2 - report.k, n_levels);
    const auto right = scan_peaks(n_levels, gamma, report.k, max_order);
    const auto left = report.mirror_k == report.k ? right : scan_peaks(n_levels, gamma, report.mirror_k, max_order);
    const std::size_t orders = std::max(right.size(), left.size());
    for (std::size_t q = 0; q < orders; ++q) {
        const bool have_right = q < right.size();
        const bool have_left = q < left.size();
        if (have_right && (!have_left || right[q].g2 >= left[q].g2)) {
            report.peaks.push_back(right[q]);
        } else {
            Peak p = left[q];
            p.tau = -p.tau;
            report.peaks.push_back(p);
        }
    }
    if (report.peaks.empty()) {
        throw CascadeError(ErrorKind::NoPeaksFound, "no cross peak above 1 for N=" + std::to_string(n_levels));
    }
    return report;
}

std::vector<PeakReport> find_peaks_many(const std::vector<PeakRequest>& requests, unsigned threads) {
    std::vector<PeakReport> out(requests.size());
    parallel_for(requests.size(), threads, [&](std::uint64_t i) {
        const auto& r = requests[i];
        try {
            out[i] = r.cross ? find_peaks_cross(r.n_levels, r.gamma, r.max_order)
                             : find_peaks(r.n_levels, r.gamma, r.k, r.max_order);
        } catch (const CascadeError&) {
            out[i].n_levels = r.n_levels;
            out[i].gamma = r.gamma;
            out[i].k = r.k;
            out[i].cross = r.cross;
        }
    });
    return out;
}

bool ViolationReport::any_violated() const {
    return std::any_of(violated.begin(), violated.end(), [](bool v) { return v; });
}

bool ViolationReport::all_violated() const {
    return !violated.empty() && std::all_of(violated.begin(), violated.end(), [](bool v) { return v; });
}

ViolationReport cs_check(const CascadeSpec& spec, int m, int n, const std::vector<double>& tau_samples) {
    require_valid(spec);
    const int N = spec.n_levels;
    if (m < 0 || m >= N || n < 0 || n >= N) throw CascadeError(ErrorKind::IndexOutOfRange, "pair out of range");
    if (m == n) throw CascadeError(ErrorKind::NotApplicable, "Cauchy-Schwarz check needs m != n");
    for (double t : tau_samples) {
        if (!(t > 0.0) || !std::isfinite(t)) {
            throw CascadeError(ErrorKind::InvalidConfig, "tau samples must be positive");
        }
    }
    const bool equal = spec.is_equal_rate();
    const double gamma = spec.rates[0];
    std::optional<Propagator> prop;
    if (!equal) prop.emplace(spec);
    auto g = [&](int a, int b, double tau) {
        return equal ? g2_equal_pair(N, a, b, gamma, tau) : prop->g2(a, b, tau);
    };

    ViolationReport r;
    r.m = m;
    r.n = n;
    r.lhs = g(n, n, 0.0) * g(m, m, 0.0);
    r.tau = tau_samples;
    double best = 0.0;
    for (double t : tau_samples) {
        const double v = g(n, m, t);
        const double rhs = v * v;
        r.rhs.push_back(rhs);
        // lhs is an exact structural zero whenever m-1 != m, so compare strictly there.
        r.violated.push_back(r.lhs == 0.0 ? rhs > 0.0 : rhs > r.lhs + 1e-12);
        if (r.lhs == 0.0) {
            if (rhs > 0.0) r.infinite_ratio = true;
        } else {
            best = std::max(best, rhs / r.lhs);
        }
    }
    if (!r.infinite_ratio && r.lhs != 0.0) r.max_ratio = best;
    return r;
}

Discontinuity discontinuity(const CascadeSpec& spec, int m, int n) {
    require_valid(spec);
    const int N = spec.n_levels;
    if (m < 0 || m >= N || n < 0 || n >= N) throw CascadeError(ErrorKind::IndexOutOfRange, "pair out of range");
    // Just after an m photon the atom sits in level m-1 with certainty, so
    // g_{m,n}(0+) = [n == m-1] / p_n, and the left limit is the mirrored pair.
    const auto p = steady_state(spec);
    Discontinuity d;
    d.right = wrap(m - 1, N) == n ? 1.0 / p[n] : 0.0;
    d.left = wrap(n - 1, N) == m ? 1.0 / p[m] : 0.0;
    if (spec.is_equal_rate()) {
        d.right = wrap(m - 1, N) == n ? static_cast<double>(N) : 0.0;
        d.left = wrap(n - 1, N) == m ? static_cast<double>(N) : 0.0;
    }
    d.jump = d.right - d.left;
    return d;
}

double bin_average(const std::function<double(double)>& f, double lo, double hi) {
    static constexpr std::array<double, 5> node = {0.0, 0.5384693101056831, -0.5384693101056831,
                                                   0.9061798459386640, -0.9061798459386640};
    static constexpr std::array<double, 5> weight = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                                     0.2369268850561891, 0.2369268850561891};
    constexpr int panels = 8;
    const double width = (hi - lo) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * width;
        for (std::size_t i = 0; i < node.size(); ++i) total += weight[i] * f(mid + 0.5 * width * node[i]);
    }
    return total * 0.5 / panels;
}

ComparisonReport compare_trace(const CorrelationTrace& estimate, const std::function<double(double)>& reference,
                               double sigmas) {
    const double width = estimate.meta.bin_width;
    const double duration = estimate.meta.duration;
    if (!(width > 0.0) || !(duration > 0.0) || estimate.std_err.size() != estimate.size()) {
        throw CascadeError(ErrorKind::InvalidConfig, "comparison needs an estimated trace");
    }
    // norm_b = g / stderr^2 = r_m r_n (T - |tau_b|) width; recover the constant factor.
    double scale = 0.0;
    for (std::size_t b = 0; b < estimate.size(); ++b) {
        if (estimate.g2[b] > 0.0 && estimate.std_err[b] > 0.0) {
            scale = estimate.g2[b] / (estimate.std_err[b] * estimate.std_err[b]) /
                    (duration - std::abs(estimate.tau[b]));
            break;
        }
    }
    if (!(scale > 0.0)) throw CascadeError(ErrorKind::EmptyChannel, "trace holds no coincidences");

    ComparisonReport report;
    report.sigmas = sigmas;
    for (std::size_t b = 0; b < estimate.size(); ++b) {
        const double centre = estimate.tau[b];
        const double expected = bin_average(reference, centre - 0.5 * width, centre + 0.5 * width);
        const double norm = scale * (duration - std::abs(centre));
        const double sigma = std::sqrt(std::max(expected, 0.0) / norm);
        const double diff = std::abs(estimate.g2[b] - expected);
        const double z = sigma > 0.0 ? diff / sigma : (diff > 0.0 ? HUGE_VAL : 0.0);
        report.max_abs_z = std::max(report.max_abs_z, z);
        ++report.bins;
        if (z <= sigmas) ++report.within;
    }
    return report;
}

std::string to_json(const PeakReport& report) {
    nlohmann::ordered_json j;
    j["kind"] = report.cross ? "cross" : "auto";
    j["n_levels"] = report.n_levels;
    j["gamma"] = report.gamma;
    j["k"] = report.k;
    if (report.cross) j["mirror_k"] = report.mirror_k;
    j["peaks"] = nlohmann::ordered_json::array();
    for (const auto& p : report.peaks) {
        j["peaks"].push_back({{"order", p.order}, {"tau", p.tau}, {"g2", p.g2}});
    }
    return j.dump(2) + "\n";
}

std::string to_csv(const PeakReport& report) {
    std::ostringstream out;
    out << "order,tau,g2\n";
    for (const auto& p : report.peaks) out << p.order << ',' << fmt17(p.tau) << ',' << fmt17(p.g2) << '\n';
    return out.str();
}

std::string to_json(const ViolationReport& report) {
    nlohmann::ordered_json j;
    j["pair"] = {report.m, report.n};
    j["lhs"] = report.lhs;
    j["samples"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < report.tau.size(); ++i) {
        j["samples"].push_back({{"tau", report.tau[i]}, {"rhs", report.rhs[i]}, {"violated", bool(report.violated[i])}});
    }
    j["any_violated"] = report.any_violated();
    j["all_violated"] = report.all_violated();
    if (report.infinite_ratio) {
        j["max_ratio"] = "infinite";
    } else if (report.max_ratio) {
        j["max_ratio"] = *report.max_ratio;
    } else {
        j["max_ratio"] = nullptr;
    }
    return j.dump(2) + "\n";
}

std::string to_json(const Discontinuity& d, int m, int n) {
    nlohmann::ordered_json j;
    j["pair"] = {m, n};
    j["left_limit"] = d.left;
    j["right_limit"] = d.right;
    j["jump"] = d.jump;
    return j.dump(2) + "\n";
}

}  // namespace cascade
