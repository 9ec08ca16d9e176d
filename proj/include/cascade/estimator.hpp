#pragma once

// Coincidence-histogram estimates of g2 from event streams.
//
// Bins have width `bin_width`, edges at integer multiples of it, are closed
// on the left and open on the right, and are reported at their centres.
// tau = 0 is therefore always a bin edge and the two sides of a jump at
// zero never share a bin.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cascade/model.hpp"

namespace cascade {

struct HistogramConfig {
    double bin_width = 0.05;
    double tau_max = 10.0;
    /// Number of bins per side; tau_max is rounded to bins_per_side * bin_width.
    int bins_per_side() const;
};

/// Throws CascadeError(ConfigInvalid) unless 0 < bin_width <= tau_max <= duration / 10.
void check_histogram(const HistogramConfig& cfg, double duration);

/// Raw pair counts of (t in `starts`, t' in `stops`) with t' - t in each bin.
/// `same_channel` drops the zero-lag self pairs. Parallel over start chunks.
std::vector<std::uint64_t> coincidence_counts(const std::vector<double>& starts,
                                              const std::vector<double>& stops,
                                              const HistogramConfig& cfg, bool same_channel,
                                              unsigned threads = 0);

/// Normalised cross/auto-correlation of channels (m, n): stop events on n a
/// delay tau after start events on m.
CorrelationTrace correlate(const EventStream& stream, int m, int n, const HistogramConfig& cfg,
                           unsigned threads = 0);

/// Autocorrelation of the merged light of a transition subset.
CorrelationTrace correlate_subset(const EventStream& stream, const SubsetSpec& subset,
                                  const HistogramConfig& cfg, unsigned threads = 0);

/// Moving-block bootstrap standard errors per bin: the record is cut into
/// `blocks` equal time slices, slices are resampled with replacement.
std::vector<double> block_bootstrap_stderr(const EventStream& stream, int m, int n,
                                           const HistogramConfig& cfg, int blocks, int resamples,
                                           std::uint64_t seed);

/// CSV `tau,g2,stderr` (estimated) or `tau,g2` (analytic), 17 significant digits.
void write_trace_csv(std::ostream& out, const CorrelationTrace& trace);

/// JSON provenance sidecar for a trace.
std::string trace_sidecar_json(const CorrelationTrace& trace, const HistogramConfig* cfg);

}  // namespace cascade
