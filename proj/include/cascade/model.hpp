#pragma once

// Domain types shared by every part of the library.
//
// Convention (zero-based, cyclic): level l in {0..N-1} has exactly one
// outgoing transition, labelled l, at rate rates[l], to level (l-1) mod N.
// Transition 0 is the reload (bottom -> top); 1..N-1 are the ladder steps.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace cascade {

enum class ErrorKind {
    ZeroLevels,
    NonPositiveRate,
    NonFiniteRate,
    RateCountMismatch,
    IndexOutOfRange,
    KOutOfRange,
    EmptySubset,
    UnequalRates,
    ImaginaryResidue,
    NumericalFailure,
    InvalidConfig,
    InsufficientSamples,
    EmptyChannel,
    ConfigInvalid,
    NoPeaksFound,
    NotApplicable,
    Parse,
    Io,
};

const char* to_string(ErrorKind kind);

class CascadeError : public std::runtime_error {
public:
    CascadeError(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct CascadeSpec {
    int n_levels = 0;
    std::vector<double> rates;

    static CascadeSpec equal(int n, double gamma);

    double max_rate() const;
    double mean_rate() const;
    /// Rates agree to 1e-12 relative to the largest one.
    bool is_equal_rate() const;

    friend bool operator==(const CascadeSpec&, const CascadeSpec&) = default;
};

struct ValidationError {
    ErrorKind kind;
    std::string message;
};

/// Empty optional means the spec is valid; otherwise the first violated invariant.
std::optional<ValidationError> validate(const CascadeSpec& spec);

/// Throws CascadeError when `validate` reports a problem.
void require_valid(const CascadeSpec& spec);

/// Transition label reduced mod N. Construction from any integer is allowed;
/// the value is always stored in [0, N).
class TransitionIndex {
public:
    TransitionIndex(long value, int n_levels);

    int value() const noexcept { return value_; }
    int n_levels() const noexcept { return n_; }

    TransitionIndex operator+(long shift) const { return {value_ + shift, n_}; }
    TransitionIndex operator-(long shift) const { return {value_ - shift, n_}; }

    friend bool operator==(const TransitionIndex&, const TransitionIndex&) = default;

private:
    int value_;
    int n_;
};

/// Reduce any integer mod n into [0, n).
inline int wrap(long value, int n) {
    const long r = value % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

/// Equal-rate trace class k = (n - m + 1) mod N of the pair (m, n).
int trace_index(int m, int n, int n_levels);
TransitionIndex trace_index(TransitionIndex m, TransitionIndex n);

class SubsetSpec {
public:
    /// Members are sorted; duplicates or out-of-range labels throw.
    SubsetSpec(std::vector<int> members, int n_levels);

    const std::vector<int>& members() const noexcept { return members_; }
    int size() const noexcept { return static_cast<int>(members_.size()); }
    int n_levels() const noexcept { return n_; }
    bool contains(int label) const;

private:
    std::vector<int> members_;
    int n_;
};

enum class TraceSource { Analytic, Spectral, Estimated };

const char* to_string(TraceSource source);

struct TraceMeta {
    std::optional<CascadeSpec> spec;
    std::optional<std::pair<int, int>> pair;
    std::optional<std::vector<int>> subset;
    TraceSource source = TraceSource::Analytic;
    // estimated traces only
    double bin_width = 0.0;
    double duration = 0.0;
};

struct CorrelationTrace {
    std::vector<double> tau;
    std::vector<double> g2;
    /// Per-bin standard errors, empty for analytic traces.
    std::vector<double> std_err;
    TraceMeta meta;

    std::size_t size() const noexcept { return tau.size(); }
};

/// Throws on violated CorrelationTrace invariants.
void check_trace(const CorrelationTrace& trace);

struct EventStream {
    int n_levels = 0;
    /// channels[l] holds the ascending timestamps of transition l.
    std::vector<std::vector<double>> channels;
    double duration = 0.0;
    std::uint64_t seed = 0;
    std::optional<CascadeSpec> spec;

    std::size_t total_events() const;
};

struct LabelledEvent {
    double time;
    int label;
};

/// Time-ordered union of all channels.
std::vector<LabelledEvent> merged_events(const EventStream& stream);

struct StreamCheck {
    std::size_t non_increasing = 0;   // within-channel or merged ties / reversals
    std::size_t cycling_breaks = 0;   // consecutive labels not l -> l-1 mod N
    std::size_t count_spread = 0;     // max - min per-channel count
    bool ok() const { return non_increasing == 0 && cycling_breaks == 0 && count_spread <= 1; }
};

StreamCheck check_stream(const EventStream& stream);

void to_json(nlohmann::json& j, const CascadeSpec& spec);
void from_json(const nlohmann::json& j, CascadeSpec& spec);

CascadeSpec parse_spec_json(const std::string& text);
CascadeSpec load_spec(const std::string& path);

}  // namespace cascade
