#pragma once

// Exact closed forms for the two- and three-level cascades, plus the limit
// and reference models used to discuss them.

#include <complex>

#include "cascade/model.hpp"

namespace cascade {

/// N = 2 correlations for m, n in {0, 1}.
double g2_two_level(double gamma0, double gamma1, int m, int n, double tau);

/// Rates of the three-level (two-photon) cascade named by emission order:
/// after the reload at rate `pump`, the first photon is emitted at rate
/// `first` (transition 2), the second at rate `second` (transition 1).
/// Note that `to_spec()` therefore returns rates {pump, second, first}.
struct ThreeLevelRates {
    double pump = 1.0;
    double first = 1.0;
    double second = 1.0;

    CascadeSpec to_spec() const;
    static ThreeLevelRates from_spec(const CascadeSpec& spec);
    double sum() const { return pump + first + second; }
};

struct ZetaValue {
    double zeta_squared = 0.0;
    std::complex<double> zeta;  // principal square root
    bool is_real() const { return zeta_squared >= 0.0; }
};

/// zeta^2 = g0^2 + g1^2 + g2^2 - 2 (g0 g1 + g0 g2 + g1 g2); symmetric in the rates.
ZetaValue zeta(const ThreeLevelRates& rates);

/// All nine N = 3 correlations. m, n are CascadeSpec transition labels.
double g2_three_level(const ThreeLevelRates& rates, int m, int n, double tau);

enum class Oscillation { Oscillatory, Overdamped, Boundary };

const char* to_string(Oscillation o);

/// Oscillatory iff zeta^2 < 0; Boundary when |zeta^2| <= 1e-12 max(g)^2.
Oscillation oscillation_condition(double gamma0, double gamma1, double gamma2);

/// g_{2,1} for pump << first, second.
double g2_limit_low_pump(const ThreeLevelRates& rates, double tau);

/// g_{2,1} for pump >> first, second.
double g2_limit_high_pump(const ThreeLevelRates& rates, double tau);

/// Heralded-photon model with probability p of good time ordering.
double g2_phenomenological(double p, double gamma1, double gamma2, double tau);

}  // namespace cascade
