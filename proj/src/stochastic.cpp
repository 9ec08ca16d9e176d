#include "cascade/stochastic.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "cascade/parallel.hpp"
#include "cascade/rng.hpp"
#include "cascade/spectral.hpp"

namespace cascade {

namespace {

static_assert(std::endian::native == std::endian::little, "binary event format assumes little-endian");

constexpr char kBinaryMagic[8] = {'C', 'A', 'S', 'C', 'E', 'V', 'B', '1'};
constexpr const char* kTextTag = "# cascade-events v1";

/// Neumaier-compensated running sum.
class CompensatedTime {
public:
    explicit CompensatedTime(double start) : sum_(start) {}

    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_;
    double comp_ = 0.0;
};

int draw_stationary(const CascadeSpec& spec, RandomStream& rng) {
    const auto p = steady_state(spec);
    const double u = rng.uniform();
    double acc = 0.0;
    for (int l = 0; l < spec.n_levels; ++l) {
        acc += p[l];
        if (u < acc) return l;
    }
    return spec.n_levels - 1;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw CascadeError(ErrorKind::Parse, "bad number '" + std::string(s) + "'");
    }
    return v;
}

template <class T>
void put(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw CascadeError(ErrorKind::Parse, "truncated binary event stream");
    return value;
}

EventStream from_merged(int n_levels, const std::vector<LabelledEvent>& events) {
    EventStream s;
    s.n_levels = n_levels;
    s.channels.assign(static_cast<std::size_t>(n_levels), {});
    double last = -std::numeric_limits<double>::infinity();
    for (const auto& e : events) {
        if (e.label < 0 || e.label >= n_levels) {
            throw CascadeError(ErrorKind::Parse, "event label out of range");
        }
        if (!(e.time > last)) {
            throw CascadeError(ErrorKind::Parse, "event timestamps must be strictly increasing");
        }
        last = e.time;
        s.channels[e.label].push_back(e.time);
    }
    return s;
}

}  // namespace

void check_config(const SimConfig& config) {
    if (auto err = validate(config.spec)) throw CascadeError(ErrorKind::InvalidConfig, err->message);
    if (const auto* d = std::get_if<StopAtDuration>(&config.stop)) {
        if (!(d->duration > 0.0) || !std::isfinite(d->duration)) {
            throw CascadeError(ErrorKind::InvalidConfig, "duration must be positive and finite");
        }
    } else if (std::get<StopAtEvents>(config.stop).events < 1) {
        throw CascadeError(ErrorKind::InvalidConfig, "event count must be >= 1");
    }
    if (!(config.burn_in >= 0.0) || !std::isfinite(config.burn_in)) {
        throw CascadeError(ErrorKind::InvalidConfig, "burn-in must be >= 0");
    }
    if (const int* level = std::get_if<int>(&config.initial)) {
        if (*level < 0 || *level >= config.spec.n_levels) {
            throw CascadeError(ErrorKind::InvalidConfig, "initial level out of range");
        }
    }
}

EventStream simulate_trajectory(const SimConfig& config, std::uint64_t index) {
    check_config(config);
    const CascadeSpec& spec = config.spec;
    const int n = spec.n_levels;
    RandomStream rng(config.seed, index);

    int level = std::holds_alternative<StationaryDraw>(config.initial)
                    ? draw_stationary(spec, rng)
                    : std::get<int>(config.initial);

    EventStream stream;
    stream.n_levels = n;
    stream.channels.assign(static_cast<std::size_t>(n), {});
    stream.seed = config.seed;
    stream.spec = spec;

    const auto* by_duration = std::get_if<StopAtDuration>(&config.stop);
    const std::uint64_t max_events =
        by_duration ? std::numeric_limits<std::uint64_t>::max() : std::get<StopAtEvents>(config.stop).events;
    if (!by_duration) {
        for (auto& c : stream.channels) c.reserve(max_events / n + 1);
    }

    // Time is measured from the end of the burn-in.
    CompensatedTime clock(-config.burn_in);
    double last = -std::numeric_limits<double>::infinity();
    std::uint64_t recorded = 0;
    while (recorded < max_events) {
        clock.add(rng.exponential(spec.rates[level]));
        double t = clock.value();
        if (by_duration && t > by_duration->duration) break;
        if (t >= 0.0) {
            // Rounding can collapse a sub-ulp dwell; keep the stream strictly increasing.
            if (!(t > last)) t = std::nextafter(last, std::numeric_limits<double>::infinity());
            stream.channels[level].push_back(t);
            last = t;
            ++recorded;
        }
        level = wrap(level - 1L, n);
    }
    stream.duration = by_duration ? by_duration->duration : std::max(last, 0.0);
    return stream;
}

EventStream simulate(const SimConfig& config) { return simulate_trajectory(config, 0); }

std::vector<EventStream> simulate_ensemble(const SimConfig& config, std::uint64_t count,
                                           unsigned threads) {
    check_config(config);
    std::vector<EventStream> out(count);
    parallel_for(count, threads, [&](std::uint64_t i) { out[i] = simulate_trajectory(config, i); });
    return out;
}

OccupancyEstimate occupancy_estimate(const EventStream& stream, std::uint64_t bootstrap_seed,
                                     int resamples) {
    const int n = stream.n_levels;
    if (n < 1) throw CascadeError(ErrorKind::ZeroLevels, "stream has no levels");
    if (!(stream.duration > 0.0)) {
        throw CascadeError(ErrorKind::InsufficientSamples, "stream has zero duration");
    }
    OccupancyEstimate est;
    if (n == 1) {
        est.fractions = {1.0};
        est.std_err = {0.0};
        est.blocks = 1;
        return est;
    }
    const auto events = merged_events(stream);
    if (events.size() < static_cast<std::size_t>(n)) {
        throw CascadeError(ErrorKind::InsufficientSamples, "too few events to visit every level");
    }

    // Occupancy segments: before event i the system sits in level label_i.
    const std::size_t segments = events.size() + 1;
    auto segment = [&](std::size_t i, int& level, double& length) {
        if (i < events.size()) {
            level = events[i].label;
            length = events[i].time - (i == 0 ? 0.0 : events[i - 1].time);
        } else {
            level = wrap(events.back().label - 1L, n);
            length = stream.duration - events.back().time;
        }
    };

    // Blocks of whole cycles (N consecutive events).
    const std::size_t cycles = events.size() / n;
    const std::size_t blocks = std::clamp<std::size_t>(cycles / 20, 1, 200);
    std::vector<std::vector<double>> block_time(blocks, std::vector<double>(n, 0.0));
    std::vector<double> total(n, 0.0);
    for (std::size_t i = 0; i < segments; ++i) {
        int level = 0;
        double length = 0.0;
        segment(i, level, length);
        const std::size_t b = std::min(blocks - 1, (i / n) * blocks / std::max<std::size_t>(cycles, 1));
        block_time[b][level] += length;
        total[level] += length;
    }
    double sum = 0.0;
    for (double t : total) sum += t;
    est.fractions.resize(n);
    for (int l = 0; l < n; ++l) {
        if (!(total[l] > 0.0)) {
            throw CascadeError(ErrorKind::InsufficientSamples, "level " + std::to_string(l) + " never visited");
        }
        est.fractions[l] = total[l] / sum;
    }
    est.blocks = blocks;
    est.std_err.assign(n, 0.0);
    if (blocks < 2 || resamples < 2) return est;

    RandomStream rng(bootstrap_seed, 0);
    std::vector<double> mean(n, 0.0), sq(n, 0.0);
    std::vector<double> acc(n);
    for (int r = 0; r < resamples; ++r) {
        std::fill(acc.begin(), acc.end(), 0.0);
        double s = 0.0;
        for (std::size_t b = 0; b < blocks; ++b) {
            const auto pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(blocks));
            for (int l = 0; l < n; ++l) {
                acc[l] += block_time[pick][l];
                s += block_time[pick][l];
            }
        }
        for (int l = 0; l < n; ++l) {
            const double f = acc[l] / s;
            mean[l] += f;
            sq[l] += f * f;
        }
    }
    for (int l = 0; l < n; ++l) {
        const double m = mean[l] / resamples;
        est.std_err[l] = std::sqrt(std::max(0.0, sq[l] / resamples - m * m) * resamples / (resamples - 1.0));
    }
    return est;
}

OccupancyEstimate occupancy_estimate(const SimConfig& config) {
    return occupancy_estimate(simulate(config), config.seed ^ 0x5EED5EEDull);
}

std::vector<double> dwell_times(const EventStream& stream, int level) {
    if (level < 0 || level >= stream.n_levels) {
        throw CascadeError(ErrorKind::IndexOutOfRange, "level out of range");
    }
    const auto events = merged_events(stream);
    std::vector<double> out;
    for (std::size_t i = 1; i < events.size(); ++i) {
        if (events[i].label == level) out.push_back(events[i].time - events[i - 1].time);
    }
    return out;
}

void write_events_text(std::ostream& out, const EventStream& stream) {
    out << kTextTag << " N=" << stream.n_levels << " seed=" << stream.seed
        << " T=" << format_double(stream.duration) << '\n';
    if (stream.spec) {
        out << "# rates";
        for (double r : stream.spec->rates) out << ' ' << format_double(r);
        out << '\n';
    }
    std::string line;
    for (const auto& e : merged_events(stream)) {
        line = format_double(e.time);
        line += ' ';
        line += std::to_string(e.label);
        line += '\n';
        out << line;
    }
}

EventStream read_events_text(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind(kTextTag, 0) != 0) {
        throw CascadeError(ErrorKind::Parse, "missing '# cascade-events v1' header");
    }
    int n_levels = 0;
    std::uint64_t seed = 0;
    double duration = 0.0;
    {
        std::istringstream hs(line.substr(std::strlen(kTextTag)));
        std::string field;
        while (hs >> field) {
            const auto eq = field.find('=');
            if (eq == std::string::npos) throw CascadeError(ErrorKind::Parse, "bad header field " + field);
            const std::string key = field.substr(0, eq);
            const std::string val = field.substr(eq + 1);
            try {
                if (key == "N") n_levels = std::stoi(val);
                else if (key == "seed") seed = std::stoull(val);
                else if (key == "T") duration = parse_double(val);
            } catch (const std::logic_error&) {
                throw CascadeError(ErrorKind::Parse, "bad header value " + field);
            }
        }
    }
    if (n_levels < 1) throw CascadeError(ErrorKind::Parse, "header needs N >= 1");

    std::optional<CascadeSpec> spec;
    std::vector<LabelledEvent> events;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# rates", 0) == 0) {
                std::istringstream rs(line.substr(7));
                CascadeSpec s{n_levels, {}};
                std::string tok;
                while (rs >> tok) s.rates.push_back(parse_double(tok));
                if (auto err = validate(s)) throw CascadeError(ErrorKind::Parse, err->message);
                spec = s;
            }
            continue;
        }
        const auto sp = line.find(' ');
        if (sp == std::string::npos) throw CascadeError(ErrorKind::Parse, "bad event line: " + line);
        const double t = parse_double(std::string_view(line).substr(0, sp));
        int label = -1;
        const auto lab = std::string_view(line).substr(sp + 1);
        auto res = std::from_chars(lab.data(), lab.data() + lab.size(), label);
        if (res.ec != std::errc{} || res.ptr != lab.data() + lab.size()) {
            throw CascadeError(ErrorKind::Parse, "bad event label: " + line);
        }
        events.push_back({t, label});
    }
    EventStream s = from_merged(n_levels, events);
    s.seed = seed;
    s.duration = duration;
    s.spec = spec;
    return s;
}

void write_events_binary(std::ostream& out, const EventStream& stream) {
    out.write(kBinaryMagic, sizeof(kBinaryMagic));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(stream.n_levels));
    put<std::uint64_t>(out, stream.seed);
    put<double>(out, stream.duration);
    const std::uint32_t n_rates = stream.spec ? static_cast<std::uint32_t>(stream.spec->rates.size()) : 0;
    put<std::uint32_t>(out, n_rates);
    if (stream.spec) {
        for (double r : stream.spec->rates) put<double>(out, r);
    }
    const auto events = merged_events(stream);
    put<std::uint64_t>(out, events.size());
    for (const auto& e : events) {
        put<double>(out, e.time);
        put<std::uint16_t>(out, static_cast<std::uint16_t>(e.label));
    }
}

EventStream read_events_binary(std::istream& in) {
    char magic[sizeof(kBinaryMagic)];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kBinaryMagic, sizeof(magic)) != 0) {
        throw CascadeError(ErrorKind::Parse, "not a binary cascade event stream");
    }
    const auto n_levels = static_cast<int>(get<std::uint32_t>(in));
    const auto seed = get<std::uint64_t>(in);
    const auto duration = get<double>(in);
    const auto n_rates = get<std::uint32_t>(in);
    if (n_levels < 1 || n_levels > 65535) throw CascadeError(ErrorKind::Parse, "bad level count");
    std::optional<CascadeSpec> spec;
    if (n_rates > 0) {
        CascadeSpec s{n_levels, {}};
        for (std::uint32_t i = 0; i < n_rates; ++i) s.rates.push_back(get<double>(in));
        if (auto err = validate(s)) throw CascadeError(ErrorKind::Parse, err->message);
        spec = s;
    }
    const auto count = get<std::uint64_t>(in);
    std::vector<LabelledEvent> events;
    events.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 26)));
    for (std::uint64_t i = 0; i < count; ++i) {
        const double t = get<double>(in);
        const int label = get<std::uint16_t>(in);
        events.push_back({t, label});
    }
    EventStream s = from_merged(n_levels, events);
    s.seed = seed;
    s.duration = duration;
    s.spec = spec;
    return s;
}

void save_events(const std::string& path, const EventStream& stream, bool binary) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw CascadeError(ErrorKind::Io, "cannot write " + path);
    if (binary) {
        write_events_binary(out, stream);
    } else {
        write_events_text(out, stream);
    }
    if (!out) throw CascadeError(ErrorKind::Io, "write failed for " + path);
}

EventStream load_events(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CascadeError(ErrorKind::Io, "cannot open " + path);
    char magic[sizeof(kBinaryMagic)] = {};
    in.read(magic, sizeof(magic));
    const bool binary = in.gcount() == sizeof(magic) && std::memcmp(magic, kBinaryMagic, sizeof(magic)) == 0;
    in.clear();
    in.seekg(0);
    return binary ? read_events_binary(in) : read_events_text(in);
}

}  // namespace cascade
