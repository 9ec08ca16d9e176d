#include "cascade/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace cascade {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ZeroLevels: return "ZeroLevels";
        case ErrorKind::NonPositiveRate: return "NonPositiveRate";
        case ErrorKind::NonFiniteRate: return "NonFiniteRate";
        case ErrorKind::RateCountMismatch: return "RateCountMismatch";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::KOutOfRange: return "KOutOfRange";
        case ErrorKind::EmptySubset: return "EmptySubset";
        case ErrorKind::UnequalRates: return "UnequalRates";
        case ErrorKind::ImaginaryResidue: return "ImaginaryResidue";
        case ErrorKind::NumericalFailure: return "NumericalFailure";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::InsufficientSamples: return "InsufficientSamples";
        case ErrorKind::EmptyChannel: return "EmptyChannel";
        case ErrorKind::ConfigInvalid: return "ConfigInvalid";
        case ErrorKind::NoPeaksFound: return "NoPeaksFound";
        case ErrorKind::NotApplicable: return "NotApplicable";
        case ErrorKind::Parse: return "Parse";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

CascadeSpec CascadeSpec::equal(int n, double gamma) {
    return CascadeSpec{n, std::vector<double>(static_cast<std::size_t>(std::max(n, 0)), gamma)};
}

double CascadeSpec::max_rate() const {
    return rates.empty() ? 0.0 : *std::max_element(rates.begin(), rates.end());
}

double CascadeSpec::mean_rate() const {
    if (rates.empty()) return 0.0;
    double s = 0.0;
    for (double r : rates) s += r;
    return s / static_cast<double>(rates.size());
}

bool CascadeSpec::is_equal_rate() const {
    if (rates.empty()) return false;
    const auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
    return (*hi - *lo) <= 1e-12 * *hi;
}

std::optional<ValidationError> validate(const CascadeSpec& spec) {
    if (spec.n_levels < 1) {
        return ValidationError{ErrorKind::ZeroLevels, "n_levels must be >= 1"};
    }
    if (spec.rates.size() != static_cast<std::size_t>(spec.n_levels)) {
        std::ostringstream os;
        os << "rates has " << spec.rates.size() << " entries, n_levels is " << spec.n_levels;
        return ValidationError{ErrorKind::RateCountMismatch, os.str()};
    }
    for (std::size_t i = 0; i < spec.rates.size(); ++i) {
        const double r = spec.rates[i];
        if (!std::isfinite(r)) {
            return ValidationError{ErrorKind::NonFiniteRate,
                                   "rate " + std::to_string(i) + " is not finite"};
        }
        if (!(r > 0.0)) {
            return ValidationError{ErrorKind::NonPositiveRate,
                                   "rate " + std::to_string(i) + " must be positive"};
        }
    }
    return std::nullopt;
}

void require_valid(const CascadeSpec& spec) {
    if (auto err = validate(spec)) throw CascadeError(err->kind, err->message);
}

TransitionIndex::TransitionIndex(long value, int n_levels) : value_(0), n_(n_levels) {
    if (n_levels < 1) throw CascadeError(ErrorKind::ZeroLevels, "TransitionIndex needs N >= 1");
    value_ = wrap(value, n_levels);
}

int trace_index(int m, int n, int n_levels) {
    return wrap(static_cast<long>(n) - m + 1, n_levels);
}

TransitionIndex trace_index(TransitionIndex m, TransitionIndex n) {
    return {trace_index(m.value(), n.value(), m.n_levels()), m.n_levels()};
}

SubsetSpec::SubsetSpec(std::vector<int> members, int n_levels)
    : members_(std::move(members)), n_(n_levels) {
    if (members_.empty()) throw CascadeError(ErrorKind::EmptySubset, "subset is empty");
    std::sort(members_.begin(), members_.end());
    for (std::size_t i = 0; i < members_.size(); ++i) {
        if (members_[i] < 0 || members_[i] >= n_levels) {
            throw CascadeError(ErrorKind::IndexOutOfRange,
                               "subset member " + std::to_string(members_[i]) + " out of range");
        }
        if (i > 0 && members_[i] == members_[i - 1]) {
            throw CascadeError(ErrorKind::IndexOutOfRange,
                               "duplicate subset member " + std::to_string(members_[i]));
        }
    }
}

bool SubsetSpec::contains(int label) const {
    return std::binary_search(members_.begin(), members_.end(), label);
}

const char* to_string(TraceSource source) {
    switch (source) {
        case TraceSource::Analytic: return "analytic";
        case TraceSource::Spectral: return "spectral";
        case TraceSource::Estimated: return "estimated";
    }
    return "unknown";
}

void check_trace(const CorrelationTrace& trace) {
    if (trace.tau.size() != trace.g2.size()) {
        throw CascadeError(ErrorKind::ConfigInvalid, "trace tau/value length mismatch");
    }
    if (!std::is_sorted(trace.tau.begin(), trace.tau.end())) {
        throw CascadeError(ErrorKind::ConfigInvalid, "trace tau grid not sorted");
    }
    for (double v : trace.g2) {
        if (!std::isfinite(v) || v < 0.0) {
            throw CascadeError(ErrorKind::NumericalFailure, "trace value negative or non-finite");
        }
    }
    if (trace.meta.source == TraceSource::Estimated) {
        if (!(trace.meta.bin_width > 0.0) || !(trace.meta.duration > 0.0)) {
            throw CascadeError(ErrorKind::ConfigInvalid,
                               "estimated trace needs positive bin width and duration");
        }
        if (trace.std_err.size() != trace.g2.size()) {
            throw CascadeError(ErrorKind::ConfigInvalid, "estimated trace needs per-bin errors");
        }
    }
}

std::size_t EventStream::total_events() const {
    std::size_t n = 0;
    for (const auto& c : channels) n += c.size();
    return n;
}

std::vector<LabelledEvent> merged_events(const EventStream& stream) {
    std::vector<LabelledEvent> out;
    out.reserve(stream.total_events());
    for (std::size_t l = 0; l < stream.channels.size(); ++l) {
        for (double t : stream.channels[l]) out.push_back({t, static_cast<int>(l)});
    }
    std::sort(out.begin(), out.end(), [](const LabelledEvent& a, const LabelledEvent& b) {
        return a.time < b.time || (a.time == b.time && a.label < b.label);
    });
    return out;
}

StreamCheck check_stream(const EventStream& stream) {
    StreamCheck check;
    std::size_t lo = std::numeric_limits<std::size_t>::max();
    std::size_t hi = 0;
    for (const auto& c : stream.channels) {
        for (std::size_t i = 1; i < c.size(); ++i) {
            if (!(c[i] > c[i - 1])) ++check.non_increasing;
        }
        lo = std::min(lo, c.size());
        hi = std::max(hi, c.size());
    }
    check.count_spread = stream.channels.empty() ? 0 : hi - lo;

    const auto merged = merged_events(stream);
    const int n = stream.n_levels;
    for (std::size_t i = 1; i < merged.size(); ++i) {
        if (!(merged[i].time > merged[i - 1].time)) ++check.non_increasing;
        if (merged[i].label != wrap(merged[i - 1].label - 1L, n)) ++check.cycling_breaks;
    }
    return check;
}

void to_json(nlohmann::json& j, const CascadeSpec& spec) {
    j = nlohmann::json{{"n_levels", spec.n_levels}, {"rates", spec.rates}};
}

void from_json(const nlohmann::json& j, CascadeSpec& spec) {
    if (!j.is_object() || !j.contains("n_levels") || !j.contains("rates")) {
        throw CascadeError(ErrorKind::Parse, "spec JSON needs \"n_levels\" and \"rates\"");
    }
    if (!j.at("n_levels").is_number_integer() || !j.at("rates").is_array()) {
        throw CascadeError(ErrorKind::Parse, "n_levels must be an integer, rates an array");
    }
    spec.n_levels = j.at("n_levels").get<int>();
    spec.rates.clear();
    for (const auto& r : j.at("rates")) {
        if (!r.is_number()) throw CascadeError(ErrorKind::Parse, "rates must be numbers");
        spec.rates.push_back(r.get<double>());
    }
}

CascadeSpec parse_spec_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw CascadeError(ErrorKind::Parse, e.what());
    }
    CascadeSpec spec = j.get<CascadeSpec>();
    require_valid(spec);
    return spec;
}

CascadeSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CascadeError(ErrorKind::Io, "cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_spec_json(buf.str());
}

}  // namespace cascade
