#pragma once

// Derived results: oscillation peaks, Cauchy-Schwarz checks, jumps at tau = 0
// and comparison of estimated traces against analytic curves.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cascade/model.hpp"

namespace cascade {

struct Peak {
    int order = 0;
    double tau = 0.0;
    double g2 = 0.0;
};

struct PeakReport {
    int n_levels = 0;
    double gamma = 1.0;
    int k = 0;
    /// Class used on the negative-tau side for cross reports, -1 otherwise.
    int mirror_k = -1;
    bool cross = false;
    std::vector<Peak> peaks;
};

/// First `max_order` maxima of g2_equal(N, k, gamma, tau) for tau > 0.
/// Grid scan at 0.01/gamma, golden-section refinement to 1e-4/gamma.
/// Throws NoPeaksFound when the trace has no maximum above 1.
PeakReport find_peaks(int n_levels, double gamma, int k, int max_order);

/// Peaks of the opposite-transition cross-correlation, class (N+3)/2, on both
/// sides of tau = 0. Per order the larger of the two mirrored peaks is kept;
/// a negative location marks the tau < 0 side.
PeakReport find_peaks_cross(int n_levels, double gamma, int max_order);

struct PeakRequest {
    int n_levels = 0;
    double gamma = 1.0;
    int k = 1;
    int max_order = 1;
    bool cross = false;
};

/// Evaluates independent requests in parallel. Failed requests yield an
/// empty report.
std::vector<PeakReport> find_peaks_many(const std::vector<PeakRequest>& requests, unsigned threads = 0);

struct ViolationReport {
    int m = 0;
    int n = 0;
    double lhs = 0.0;  // g_nn(0) g_mm(0)
    std::vector<double> tau;
    std::vector<double> rhs;  // g_nm(tau)^2
    /// rhs > lhs + 1e-12, or rhs > 0 when lhs is exactly zero.
    std::vector<bool> violated;
    /// Set when lhs = 0 and some rhs > 0; max_ratio is then empty.
    bool infinite_ratio = false;
    std::optional<double> max_ratio;

    bool any_violated() const;
    bool all_violated() const;
};

/// Throws NotApplicable for m == n and InvalidConfig for tau samples <= 0.
ViolationReport cs_check(const CascadeSpec& spec, int m, int n, const std::vector<double>& tau_samples);

struct Discontinuity {
    double left = 0.0;
    double right = 0.0;
    double jump = 0.0;
};

/// One-sided limits of g_{m,n} at tau = 0.
Discontinuity discontinuity(const CascadeSpec& spec, int m, int n);

/// Mean of f over [lo, hi] (composite Gauss-Legendre).
double bin_average(const std::function<double(double)>& f, double lo, double hi);

struct ComparisonReport {
    std::size_t bins = 0;
    std::size_t within = 0;
    double sigmas = 3.0;
    double max_abs_z = 0.0;
    double fraction() const { return bins ? static_cast<double>(within) / static_cast<double>(bins) : 0.0; }
};

/// Compares an estimated trace with the bin average of `reference` over each
/// bin. sigma per bin is the Poisson error of the expected count, so bins
/// with zero counts are still tested.
ComparisonReport compare_trace(const CorrelationTrace& estimate, const std::function<double(double)>& reference,
                               double sigmas = 3.0);

std::string to_json(const PeakReport& report);
std::string to_csv(const PeakReport& report);
std::string to_json(const ViolationReport& report);
std::string to_json(const Discontinuity& d, int m, int n);

}  // namespace cascade
