#include "cascade/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

#include "cascade/format.hpp"
#include "cascade/parallel.hpp"
#include "cascade/rng.hpp"

namespace cascade {

namespace {

const std::vector<double>& channel(const EventStream& stream, int label) {
    if (label < 0 || label >= stream.n_levels || static_cast<std::size_t>(label) >= stream.channels.size()) {
        throw CascadeError(ErrorKind::IndexOutOfRange, "channel " + std::to_string(label) + " out of range");
    }
    const auto& c = stream.channels[label];
    if (c.empty()) throw CascadeError(ErrorKind::EmptyChannel, "channel " + std::to_string(label) + " is empty");
    return c;
}

void accumulate(const std::vector<double>& starts, std::size_t begin, std::size_t end,
                const std::vector<double>& stops, double width, int bins_per_side, bool same_channel,
                std::vector<std::uint64_t>& hist) {
    const double reach = bins_per_side * width;
    const int total_bins = 2 * bins_per_side;
    if (begin >= end) return;
    auto lo = static_cast<std::size_t>(
        std::lower_bound(stops.begin(), stops.end(), starts[begin] - reach) - stops.begin());
    for (std::size_t i = begin; i < end; ++i) {
        const double t = starts[i];
        while (lo < stops.size() && stops[lo] < t - reach) ++lo;
        for (std::size_t j = lo; j < stops.size(); ++j) {
            const double lag = stops[j] - t;
            if (lag >= reach) break;
            if (same_channel && j == i) continue;
            const auto b = static_cast<long>(std::floor(lag / width)) + bins_per_side;
            if (b >= 0 && b < total_bins) ++hist[static_cast<std::size_t>(b)];
        }
    }
}

CorrelationTrace normalise(const std::vector<std::uint64_t>& counts, double n_start, double n_stop,
                           double duration, const HistogramConfig& cfg) {
    const int b_side = cfg.bins_per_side();
    const double width = cfg.bin_width;
    const double rate_start = n_start / duration;
    const double rate_stop = n_stop / duration;
    CorrelationTrace trace;
    trace.tau.resize(counts.size());
    trace.g2.resize(counts.size());
    trace.std_err.resize(counts.size());
    for (std::size_t b = 0; b < counts.size(); ++b) {
        const double centre = (static_cast<double>(static_cast<long>(b) - b_side) + 0.5) * width;
        const double norm = rate_start * rate_stop * (duration - std::abs(centre)) * width;
        const auto c = static_cast<double>(counts[b]);
        trace.tau[b] = centre;
        trace.g2[b] = c / norm;
        trace.std_err[b] = std::sqrt(c) / norm;
    }
    trace.meta.source = TraceSource::Estimated;
    trace.meta.bin_width = width;
    trace.meta.duration = duration;
    return trace;
}

}  // namespace

int HistogramConfig::bins_per_side() const {
    return std::max(1, static_cast<int>(std::floor(tau_max / bin_width + 1e-9)));
}

void check_histogram(const HistogramConfig& cfg, double duration) {
    if (!(cfg.bin_width > 0.0) || !std::isfinite(cfg.bin_width)) {
        throw CascadeError(ErrorKind::ConfigInvalid, "bin width must be positive");
    }
    if (!(cfg.tau_max >= cfg.bin_width) || !std::isfinite(cfg.tau_max)) {
        throw CascadeError(ErrorKind::ConfigInvalid, "tau_max must be at least one bin width");
    }
    if (!(cfg.tau_max <= duration / 10.0)) {
        throw CascadeError(ErrorKind::ConfigInvalid, "tau_max must not exceed a tenth of the record");
    }
}

std::vector<std::uint64_t> coincidence_counts(const std::vector<double>& starts,
                                              const std::vector<double>& stops,
                                              const HistogramConfig& cfg, bool same_channel,
                                              unsigned threads) {
    const int b_side = cfg.bins_per_side();
    const std::size_t bins = 2 * static_cast<std::size_t>(b_side);
    if (threads == 0) threads = worker_count();
    const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(threads * 4, starts.size() / 4096 + 1));
    std::vector<std::vector<std::uint64_t>> partial(chunks, std::vector<std::uint64_t>(bins, 0));
    parallel_for(chunks, threads, [&](std::uint64_t c) {
        const std::size_t begin = starts.size() * c / chunks;
        const std::size_t end = starts.size() * (c + 1) / chunks;
        accumulate(starts, begin, end, stops, cfg.bin_width, b_side, same_channel, partial[c]);
    });
    std::vector<std::uint64_t> total(bins, 0);
    for (const auto& p : partial) {
        for (std::size_t b = 0; b < bins; ++b) total[b] += p[b];
    }
    return total;
}

CorrelationTrace correlate(const EventStream& stream, int m, int n, const HistogramConfig& cfg,
                           unsigned threads) {
    const auto& starts = channel(stream, m);
    const auto& stops = channel(stream, n);
    check_histogram(cfg, stream.duration);
    const auto counts = coincidence_counts(starts, stops, cfg, m == n, threads);
    CorrelationTrace trace = normalise(counts, static_cast<double>(starts.size()),
                                       static_cast<double>(stops.size()), stream.duration, cfg);
    trace.meta.spec = stream.spec;
    trace.meta.pair = std::make_pair(m, n);
    return trace;
}

CorrelationTrace correlate_subset(const EventStream& stream, const SubsetSpec& subset,
                                  const HistogramConfig& cfg, unsigned threads) {
    if (subset.n_levels() != stream.n_levels) {
        throw CascadeError(ErrorKind::IndexOutOfRange, "subset built for a different N");
    }
    std::vector<double> merged;
    for (int label : subset.members()) {
        const auto& c = channel(stream, label);
        const auto mid = merged.size();
        merged.insert(merged.end(), c.begin(), c.end());
        std::inplace_merge(merged.begin(), merged.begin() + static_cast<std::ptrdiff_t>(mid), merged.end());
    }
    check_histogram(cfg, stream.duration);
    const auto counts = coincidence_counts(merged, merged, cfg, true, threads);
    const auto total = static_cast<double>(merged.size());
    CorrelationTrace trace = normalise(counts, total, total, stream.duration, cfg);
    trace.meta.spec = stream.spec;
    trace.meta.subset = subset.members();
    return trace;
}

std::vector<double> block_bootstrap_stderr(const EventStream& stream, int m, int n,
                                           const HistogramConfig& cfg, int blocks, int resamples,
                                           std::uint64_t seed) {
    if (blocks < 2 || resamples < 2) {
        throw CascadeError(ErrorKind::ConfigInvalid, "bootstrap needs >= 2 blocks and resamples");
    }
    const auto& starts = channel(stream, m);
    const auto& stops = channel(stream, n);
    check_histogram(cfg, stream.duration);
    const int b_side = cfg.bins_per_side();
    const std::size_t bins = 2 * static_cast<std::size_t>(b_side);

    std::vector<std::vector<std::uint64_t>> per_block(blocks, std::vector<std::uint64_t>(bins, 0));
    std::size_t begin = 0;
    for (int k = 0; k < blocks; ++k) {
        const double edge = stream.duration * (k + 1) / blocks;
        std::size_t end = begin;
        while (end < starts.size() && (starts[end] < edge || k == blocks - 1)) ++end;
        accumulate(starts, begin, end, stops, cfg.bin_width, b_side, m == n, per_block[k]);
        begin = end;
    }
    const auto reference = normalise(std::vector<std::uint64_t>(bins, 1), static_cast<double>(starts.size()),
                                     static_cast<double>(stops.size()), stream.duration, cfg);

    RandomStream rng(seed, 0);
    std::vector<double> mean(bins, 0.0), sq(bins, 0.0);
    std::vector<double> acc(bins);
    for (int r = 0; r < resamples; ++r) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int k = 0; k < blocks; ++k) {
            const auto pick = static_cast<std::size_t>(rng.uniform() * blocks);
            for (std::size_t b = 0; b < bins; ++b) acc[b] += static_cast<double>(per_block[pick][b]);
        }
        for (std::size_t b = 0; b < bins; ++b) {
            // reference.g2[b] is 1 / norm for a unit count
            const double g = acc[b] * reference.g2[b];
            mean[b] += g;
            sq[b] += g * g;
        }
    }
    std::vector<double> out(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        const double mu = mean[b] / resamples;
        out[b] = std::sqrt(std::max(0.0, sq[b] / resamples - mu * mu) * resamples / (resamples - 1.0));
    }
    return out;
}

void write_trace_csv(std::ostream& out, const CorrelationTrace& trace) {
    const bool with_err = !trace.std_err.empty();
    out << (with_err ? "tau,g2,stderr\n" : "tau,g2\n");
    for (std::size_t i = 0; i < trace.size(); ++i) {
        out << fmt17(trace.tau[i]) << ',' << fmt17(trace.g2[i]);
        if (with_err) out << ',' << fmt17(trace.std_err[i]);
        out << '\n';
    }
}

std::string trace_sidecar_json(const CorrelationTrace& trace, const HistogramConfig* cfg) {
    nlohmann::ordered_json j;
    j["source"] = to_string(trace.meta.source);
    if (trace.meta.pair) j["pair"] = {trace.meta.pair->first, trace.meta.pair->second};
    if (trace.meta.subset) j["subset"] = *trace.meta.subset;
    if (trace.meta.spec) j["spec"] = {{"n_levels", trace.meta.spec->n_levels}, {"rates", trace.meta.spec->rates}};
    if (trace.meta.source == TraceSource::Estimated) {
        j["bin_width"] = trace.meta.bin_width;
        j["duration"] = trace.meta.duration;
    }
    if (cfg) {
        j["tau_max"] = cfg->bins_per_side() * cfg->bin_width;
        j["bins"] = 2 * cfg->bins_per_side();
        j["bin_convention"] = "closed-left, open-right, reported at centre";
    }
    j["points"] = trace.size();
    return j.dump(2) + "\n";
}

}  // namespace cascade
