#include "cascade/analytic_equal.hpp"

#include <cmath>
#include <numbers>

namespace cascade {

namespace {

constexpr double kImagTolerance = 1e-10;
// Below this value the root sum is dominated by cancellation; switch to the series.
constexpr double kSeriesSwitch = 1e-3;

void check_common(int n_levels, double gamma, double tau) {
    if (n_levels < 1) throw CascadeError(ErrorKind::ZeroLevels, "N must be >= 1");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw CascadeError(ErrorKind::NonPositiveRate, "gamma must be positive and finite");
    }
    if (!std::isfinite(tau)) throw CascadeError(ErrorKind::ConfigInvalid, "tau must be finite");
}

void check_label(int label, int n_levels) {
    if (label < 0 || label >= n_levels) {
        throw CascadeError(ErrorKind::IndexOutOfRange,
                           "transition " + std::to_string(label) + " out of range");
    }
}

}  // namespace

RootOfUnity::RootOfUnity(int n) : n_(n) {
    if (n < 1) throw CascadeError(ErrorKind::ZeroLevels, "root of unity needs N >= 1");
}

std::complex<double> RootOfUnity::power(long p) const {
    const int r = wrap(p, n_);
    return std::polar(1.0, 2.0 * std::numbers::pi * r / n_);
}

double g2_equal_excess(int n_levels, int k, double gamma, double tau) {
    check_common(n_levels, gamma, tau);
    if (tau < 0.0) throw CascadeError(ErrorKind::ConfigInvalid, "g2_equal needs tau >= 0");
    if (n_levels == 1) return 0.0;

    const RootOfUnity z(n_levels);
    const double x = gamma * tau;
    const long kk = wrap(k, n_levels);
    std::complex<double> sum{0.0, 0.0};
    // Pair j with N - j so the imaginary parts cancel term by term.
    for (int j = 1; 2 * j < n_levels; ++j) {
        const int jb = n_levels - j;
        sum += z.power(j * kk) * std::exp(-x * (1.0 - z.power(j)));
        sum += z.power(jb * kk) * std::exp(-x * (1.0 - z.power(jb)));
    }
    if (n_levels % 2 == 0) {
        const int h = n_levels / 2;
        sum += z.power(h * kk) * std::exp(-x * (1.0 - z.power(h)));
    }
    if (std::abs(sum.imag()) > kImagTolerance) {
        throw CascadeError(ErrorKind::ImaginaryResidue,
                           "root-of-unity sum left imaginary part " + std::to_string(sum.imag()));
    }
    return sum.real();
}

double g2_equal_series(int n_levels, int k, double gamma, double tau) {
    check_common(n_levels, gamma, tau);
    if (tau < 0.0) throw CascadeError(ErrorKind::ConfigInvalid, "g2_equal needs tau >= 0");
    if (n_levels == 1) return 1.0;

    const int r = wrap(static_cast<long>(n_levels) - k, n_levels);
    const double x = gamma * tau;
    const double n = n_levels;
    if (x == 0.0) return r == 0 ? n : 0.0;

    double sum = 0.0;
    if (x < 50.0) {
        // Poisson pmf by recurrence from p = 0.
        double term = std::exp(-x);
        const double p_stop = x + 40.0 * std::sqrt(x) + 60.0;
        for (long p = 0;; ++p) {
            if (p > 0) term *= x / static_cast<double>(p);
            if (wrap(p, n_levels) == r) sum += term;
            if (p > p_stop && term < 1e-300) break;
            if (p > p_stop && term < 1e-18 * sum) break;
        }
    } else {
        const double lx = std::log(x);
        const double width = 40.0 * std::sqrt(x) + 60.0;
        long p = static_cast<long>(std::max(0.0, std::floor(x - width)));
        p += wrap(static_cast<long>(r) - p, n_levels);
        const long p_end = static_cast<long>(std::ceil(x + width));
        for (; p <= p_end; p += n_levels) {
            sum += std::exp(static_cast<double>(p) * lx - x - std::lgamma(static_cast<double>(p) + 1.0));
        }
    }
    return n * sum;
}

double g2_equal(int n_levels, int k, double gamma, double tau) {
    check_common(n_levels, gamma, tau);
    if (tau < 0.0) throw CascadeError(ErrorKind::ConfigInvalid, "g2_equal needs tau >= 0");
    if (n_levels == 1) return 1.0;
    const double value = 1.0 + g2_equal_excess(n_levels, k, gamma, tau);
    if (value < kSeriesSwitch) return g2_equal_series(n_levels, k, gamma, tau);
    return value;
}

double g2_equal_pair(int n_levels, int m, int n, double gamma, double tau) {
    check_common(n_levels, gamma, tau);
    check_label(m, n_levels);
    check_label(n, n_levels);
    if (tau >= 0.0) return g2_equal(n_levels, trace_index(m, n, n_levels), gamma, tau);
    return g2_equal(n_levels, trace_index(n, m, n_levels), gamma, -tau);
}

double small_tau_leading(int n_levels, int k, double gamma, double tau) {
    check_common(n_levels, gamma, tau);
    if (k < 1 || k > n_levels) {
        throw CascadeError(ErrorKind::KOutOfRange, "small_tau_leading needs 1 <= k <= N");
    }
    if (tau < 0.0) throw CascadeError(ErrorKind::ConfigInvalid, "small_tau_leading needs tau >= 0");
    const double x = gamma * tau;
    const double n = n_levels;
    if (k == n_levels) return n * std::exp(-x);
    double term = n;
    for (int p = 1; p <= n_levels - k; ++p) term *= x / p;
    return term;
}

double g2_subset(const SubsetSpec& subset, double gamma, double tau) {
    const int n_levels = subset.n_levels();
    double sum = 0.0;
    for (int i : subset.members()) {
        for (int j : subset.members()) sum += g2_equal_pair(n_levels, i, j, gamma, tau);
    }
    const double ns = subset.size();
    return sum / (ns * ns);
}

double g2_subset(const CascadeSpec& spec, const SubsetSpec& subset, double tau) {
    require_valid(spec);
    if (!spec.is_equal_rate()) {
        throw CascadeError(ErrorKind::UnequalRates, "subset correlations need equal rates");
    }
    if (subset.n_levels() != spec.n_levels) {
        throw CascadeError(ErrorKind::IndexOutOfRange, "subset built for a different N");
    }
    return g2_subset(subset, spec.rates[0], tau);
}

double bundle_peak(int n_levels, int subset_size) {
    if (n_levels < 1) throw CascadeError(ErrorKind::ZeroLevels, "N must be >= 1");
    if (subset_size < 1) throw CascadeError(ErrorKind::EmptySubset, "subset size must be >= 1");
    const double ns = subset_size;
    return n_levels * (ns - 1.0) / (ns * ns);
}

}  // namespace cascade
