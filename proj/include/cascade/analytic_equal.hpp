#pragma once

// Closed forms for the equal-rate cascade (every rate equal to gamma).

#include <complex>

#include "cascade/model.hpp"

namespace cascade {

/// z_N = exp(2 i pi / N) and its powers.
class RootOfUnity {
public:
    explicit RootOfUnity(int n);

    int order() const noexcept { return n_; }
    std::complex<double> value() const { return power(1); }
    /// z_N^p for any integer p, evaluated from the reduced exponent.
    std::complex<double> power(long p) const;

private:
    int n_;
};

/// g2 of trace class k for tau >= 0:
///   1 + sum_{j=1}^{N-1} z^{jk} exp(-gamma tau (1 - z^j)).
/// N = 1 gives exactly 1. At tau = 0 the k = 0 class returns its right limit N.
double g2_equal(int n_levels, int k, double gamma, double tau);

/// g2 - 1 from the root-of-unity sum alone, without adding the Poisson level.
/// Keeps relative precision in the far oscillation tail.
double g2_equal_excess(int n_levels, int k, double gamma, double tau);

/// Same quantity as `g2_equal` from the equivalent real series
///   N e^{-x} sum_{p = (N-k) mod N (mod N)} x^p / p!,   x = gamma tau,
/// i.e. N times the probability that a Poisson(x) count falls in one residue
/// class. All terms are positive, so it is exact where the root sum cancels.
double g2_equal_series(int n_levels, int k, double gamma, double tau);

/// Signed-tau correlation of transitions (m, n); negative tau uses the mirror pair.
double g2_equal_pair(int n_levels, int m, int n, double gamma, double tau);

/// Leading small-tau term. Requires 1 <= k <= N (caller maps k = 0 to N).
double small_tau_leading(int n_levels, int k, double gamma, double tau);

/// Correlation of the merged light of a transition subset.
double g2_subset(const SubsetSpec& subset, double gamma, double tau);

/// Subset correlation for a spec; unequal rates are rejected (UnequalRates).
double g2_subset(const CascadeSpec& spec, const SubsetSpec& subset, double tau);

/// Central bundle peak N (n_S - 1) / n_S^2 for a contiguous subset.
double bundle_peak(int n_levels, int subset_size);

}  // namespace cascade
