#include "cascade/three_level.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace cascade {

namespace {

using real = long double;
using cplx = std::complex<long double>;

constexpr double kImagTolerance = 1e-10;
// Inside |zeta^2| < (kBoundaryBand * sum)^2 the 1/zeta forms are averaged
// across the boundary instead of evaluated directly.
constexpr real kBoundaryBand = 1e-3L;

void check_rate(double g, const char* name) {
    if (!(g > 0.0) || !std::isfinite(g)) {
        throw CascadeError(ErrorKind::NonPositiveRate, std::string(name) + " must be positive and finite");
    }
}

void check_rates(const ThreeLevelRates& r) {
    check_rate(r.pump, "pump rate");
    check_rate(r.first, "first-photon rate");
    check_rate(r.second, "second-photon rate");
}

real zeta_squared(real g0, real g1, real g2) {
    return g0 * g0 + g1 * g1 + g2 * g2 - 2.0L * (g0 * g1 + g0 * g2 + g1 * g2);
}

/// Autocorrelation for given zeta (any branch; the expression is even in zeta).
cplx auto_form(real g0, real g1, real g2, cplx z, real tau) {
    const real s = g0 + g1 + g2;
    const real t = std::fabs(tau);
    return 1.0L + (s - z) / (2.0L * z) * std::exp(-(s + z) * t / 2.0L)
           - (s + z) / (2.0L * z) * std::exp(-(s - z) * t / 2.0L);
}

/// Contiguous cascade correlation in emission-order naming: detect the
/// first photon (rate g1), then the second (rate g2) a delay tau later.
cplx cascade_form(real g0, real g1, real g2, cplx z, real tau) {
    const real s = g0 + g1 + g2;
    if (tau >= 0.0L) {
        const real a0 = -g0 + g1 + g2;
        const cplx a = (a0 + z) * ((g0 - g1 + z) * g1 + (2.0L * g0 + g1) * g2)
                       * std::exp(-(s + z) * tau / 2.0L);
        const cplx b = (a0 - z) * ((g0 - g1 - z) * g1 + (2.0L * g0 + g1) * g2)
                       * std::exp(-(s - z) * tau / 2.0L);
        return 1.0L + (a - b) / (4.0L * z * g0 * g1);
    }
    const real c0 = g0 - g1 + g2;
    const real q = g1 * g1 + g2 * g2;
    const cplx a = (c0 - z) * (q - (g0 + z) * (g1 + g2)) * std::exp((s + z) * tau / 2.0L);
    const cplx b = (c0 + z) * (q - (g0 - z) * (g1 + g2)) * std::exp((s - z) * tau / 2.0L);
    return 1.0L + (a - b) / (4.0L * z * g2 * g2);
}

template <class Form>
double evaluate(Form form, real g0, real g1, real g2, real tau) {
    const real z2 = zeta_squared(g0, g1, g2);
    const real band = kBoundaryBand * (g0 + g1 + g2);
    const real h = band * band;
    cplx value;
    if (std::fabs(z2) >= h) {
        value = form(g0, g1, g2, std::sqrt(cplx(z2, 0.0L)), tau);
    } else {
        // Smooth in zeta^2: average two points placed symmetrically outside the band.
        const cplx up = form(g0, g1, g2, std::sqrt(cplx(z2 + 2.0L * h, 0.0L)), tau);
        const cplx down = form(g0, g1, g2, std::sqrt(cplx(z2 - 2.0L * h, 0.0L)), tau);
        value = 0.5L * (up + down);
    }
    const double re = static_cast<double>(value.real());
    const double im = static_cast<double>(value.imag());
    if (std::abs(im) > kImagTolerance * std::max(1.0, std::abs(re))) {
        throw CascadeError(ErrorKind::ImaginaryResidue,
                           "three-level closed form left imaginary part " + std::to_string(im));
    }
    return re;
}

void check_label(int label, int n) {
    if (label < 0 || label >= n) {
        throw CascadeError(ErrorKind::IndexOutOfRange,
                           "transition " + std::to_string(label) + " out of range");
    }
}

}  // namespace

double g2_two_level(double gamma0, double gamma1, int m, int n, double tau) {
    check_rate(gamma0, "gamma0");
    check_rate(gamma1, "gamma1");
    check_label(m, 2);
    check_label(n, 2);
    const double decay = std::exp(-(gamma0 + gamma1) * std::abs(tau));
    if (m == n) return 1.0 - decay;
    if (m == 0) tau = -tau;  // g_{0,1}(tau) = g_{1,0}(-tau)
    const double ratio = tau >= 0.0 ? gamma0 / gamma1 : gamma1 / gamma0;
    return 1.0 + ratio * decay;
}

CascadeSpec ThreeLevelRates::to_spec() const {
    return CascadeSpec{3, {pump, second, first}};
}

ThreeLevelRates ThreeLevelRates::from_spec(const CascadeSpec& spec) {
    require_valid(spec);
    if (spec.n_levels != 3) throw CascadeError(ErrorKind::NotApplicable, "spec is not a 3-level cascade");
    return ThreeLevelRates{spec.rates[0], spec.rates[2], spec.rates[1]};
}

ZetaValue zeta(const ThreeLevelRates& rates) {
    check_rates(rates);
    ZetaValue z;
    z.zeta_squared = static_cast<double>(zeta_squared(rates.pump, rates.first, rates.second));
    z.zeta = std::sqrt(std::complex<double>(z.zeta_squared, 0.0));
    return z;
}

double g2_three_level(const ThreeLevelRates& rates, int m, int n, double tau) {
    check_rates(rates);
    check_label(m, 3);
    check_label(n, 3);
    if (!std::isfinite(tau)) throw CascadeError(ErrorKind::ConfigInvalid, "tau must be finite");
    const real t = tau;
    if (m == n) {
        return evaluate(auto_form, rates.pump, rates.first, rates.second, t);
    }
    if (n == wrap(m + 1L, 3)) return g2_three_level(rates, n, m, -tau);

    // (m, m-1): rotate labels so the pair becomes (2, 1), i.e. r'[l] = r[l - shift].
    const auto spec = rates.to_spec();
    const int shift = wrap(2L - m, 3);
    std::array<real, 3> r{};
    for (int l = 0; l < 3; ++l) r[l] = spec.rates[wrap(static_cast<long>(l) - shift, 3)];
    // The closed form names rates by emission order: pump r[0], first r[2], second r[1].
    return evaluate(cascade_form, r[0], r[2], r[1], t);
}

const char* to_string(Oscillation o) {
    switch (o) {
        case Oscillation::Oscillatory: return "Oscillatory";
        case Oscillation::Overdamped: return "Overdamped";
        case Oscillation::Boundary: return "Boundary";
    }
    return "Unknown";
}

Oscillation oscillation_condition(double gamma0, double gamma1, double gamma2) {
    check_rate(gamma0, "gamma0");
    check_rate(gamma1, "gamma1");
    check_rate(gamma2, "gamma2");
    const double z2 = static_cast<double>(zeta_squared(gamma0, gamma1, gamma2));
    const double gmax = std::max({gamma0, gamma1, gamma2});
    if (std::abs(z2) <= 1e-12 * gmax * gmax) return Oscillation::Boundary;
    return z2 < 0.0 ? Oscillation::Oscillatory : Oscillation::Overdamped;
}

double g2_limit_low_pump(const ThreeLevelRates& rates, double tau) {
    check_rates(rates);
    if (tau < 0.0) return 1.0 - std::exp(rates.first * tau);
    return 1.0 + rates.second / rates.pump * std::exp(-rates.second * tau);
}

double g2_limit_high_pump(const ThreeLevelRates& rates, double tau) {
    check_rates(rates);
    const double g0 = rates.pump;
    const double g1 = rates.first;
    const double g2 = rates.second;
    if (tau < 0.0) {
        return 1.0 + g1 / g2 * std::exp((g1 + g2) * tau) - (1.0 + g1 / g2) * std::exp(g0 * tau);
    }
    return 1.0 + g2 / g1 * std::exp(-(g1 + g2) * tau);
}

double g2_phenomenological(double p, double gamma1, double gamma2, double tau) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw CascadeError(ErrorKind::ConfigInvalid, "ordering probability must lie in [0, 1]");
    }
    check_rate(gamma1, "gamma1");
    check_rate(gamma2, "gamma2");
    if (tau < 0.0) return 1.0 + (1.0 - p) * gamma2 / gamma1 * std::exp(gamma2 * tau);
    return 1.0 + p * gamma2 / gamma1 * std::exp(-gamma2 * tau);
}

}  // namespace cascade
