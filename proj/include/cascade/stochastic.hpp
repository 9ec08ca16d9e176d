#pragma once

// Continuous-time jump-process simulator for the one-way cascade.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cascade/model.hpp"

namespace cascade {

struct StationaryDraw {};

struct StopAtDuration {
    double duration;
};

struct StopAtEvents {
    std::uint64_t events;
};

struct SimConfig {
    CascadeSpec spec;
    std::uint64_t seed = 0;
    std::variant<StopAtDuration, StopAtEvents> stop = StopAtEvents{1000};
    std::variant<StationaryDraw, int> initial = StationaryDraw{};
    double burn_in = 0.0;
};

/// Throws CascadeError(InvalidConfig) on a bad configuration.
void check_config(const SimConfig& config);

/// One trajectory; identical to `simulate_trajectory(config, 0)`.
EventStream simulate(const SimConfig& config);

/// Trajectory `index` of the ensemble keyed by config.seed.
EventStream simulate_trajectory(const SimConfig& config, std::uint64_t index);

/// Independent trajectories 0..count-1, generated in parallel. The result
/// does not depend on the number of worker threads.
std::vector<EventStream> simulate_ensemble(const SimConfig& config, std::uint64_t count,
                                           unsigned threads = 0);

struct OccupancyEstimate {
    std::vector<double> fractions;
    /// Cycle-block bootstrap standard errors.
    std::vector<double> std_err;
    std::size_t blocks = 0;
};

/// Time-weighted level occupancy over [0, duration] reconstructed from the stream.
OccupancyEstimate occupancy_estimate(const EventStream& stream, std::uint64_t bootstrap_seed = 1,
                                     int resamples = 200);

OccupancyEstimate occupancy_estimate(const SimConfig& config);

/// Dwell times spent in `level` before each emission of transition `level`
/// (the first, possibly truncated, dwell is skipped).
std::vector<double> dwell_times(const EventStream& stream, int level);

// Event-stream files.
//
// Text: `# cascade-events v1 N=<n> seed=<s> T=<t>`, optional `# rates ...`,
// then `<timestamp> <label>` per line in ascending time.
// Binary: "CASCEVB1", u32 N, u64 seed, f64 T, u32 rate count, f64 rates...,
// u64 record count, then records of (f64 timestamp, u16 label). Little-endian.

void write_events_text(std::ostream& out, const EventStream& stream);
EventStream read_events_text(std::istream& in);
void write_events_binary(std::ostream& out, const EventStream& stream);
EventStream read_events_binary(std::istream& in);

void save_events(const std::string& path, const EventStream& stream, bool binary);
/// Detects the binary variant by its magic bytes.
EventStream load_events(const std::string& path);

}  // namespace cascade
