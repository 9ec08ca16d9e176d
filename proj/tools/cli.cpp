#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cascade/analysis.hpp"
#include "cascade/analytic_equal.hpp"
#include "cascade/estimator.hpp"
#include "cascade/format.hpp"
#include "cascade/parallel.hpp"
#include "cascade/spectral.hpp"
#include "cascade/stochastic.hpp"
#include "cascade/three_level.hpp"

namespace cascade::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Grid {
    double lo = -10.0;
    double hi = 10.0;
    int steps = 1000;

    double at(int i) const { return (lo * (steps - i) + hi * i) / steps; }
    std::vector<double> points() const {
        std::vector<double> p(static_cast<std::size_t>(steps) + 1);
        for (int i = 0; i <= steps; ++i) p[i] = at(i);
        return p;
    }
};

Grid parse_grid(const std::string& text, int steps, const std::string& flag) {
    const auto colon = text.find(':', 1);
    if (colon == std::string::npos) throw UsageError(flag + ": expected lo:hi, got '" + text + "'");
    Grid g;
    try {
        std::size_t used = 0;
        g.lo = std::stod(text.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument("lo");
        const std::string rest = text.substr(colon + 1);
        g.hi = std::stod(rest, &used);
        if (used != rest.size()) throw std::invalid_argument("hi");
    } catch (const std::exception&) {
        throw UsageError(flag + ": expected lo:hi, got '" + text + "'");
    }
    if (!std::isfinite(g.lo) || !std::isfinite(g.hi) || !(g.hi > g.lo)) {
        throw UsageError(flag + ": need finite lo < hi");
    }
    if (steps < 1) throw UsageError("--steps: must be >= 1");
    g.steps = steps;
    return g;
}

std::vector<int> parse_ints(const std::string& text, const std::string& flag) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(flag + ": '" + text + "' is not a comma-separated integer list");
        }
    }
    if (out.empty()) throw UsageError(flag + ": empty list");
    return out;
}

std::vector<double> parse_doubles(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(flag + ": '" + text + "' is not a comma-separated number list");
        }
    }
    if (out.empty()) throw UsageError(flag + ": empty list");
    return out;
}

std::pair<int, int> parse_pair(const std::string& text) {
    const auto v = parse_ints(text, "--pair");
    if (v.size() != 2) throw UsageError("--pair: expected m,n");
    return {v[0], v[1]};
}

// A spec given by --n/--gamma, --rates FILE or --rate-list.
struct SpecArgs {
    int n = 0;
    double gamma = 1.0;
    std::string rates_file;
    std::string rate_list;

    void attach(CLI::App* app) {
        app->add_option("--n", n, "number of levels (equal rates)");
        app->add_option("--gamma", gamma, "common rate")->capture_default_str();
        app->add_option("--rates", rates_file, "JSON spec file {\"n_levels\", \"rates\"}");
        app->add_option("--rate-list", rate_list, "comma-separated rates, transition 0 first");
    }

    CascadeSpec build() const {
        CascadeSpec spec;
        if (!rates_file.empty()) {
            spec = load_spec(rates_file);
        } else if (!rate_list.empty()) {
            spec.rates = parse_doubles(rate_list, "--rate-list");
            spec.n_levels = static_cast<int>(spec.rates.size());
        } else {
            if (n < 1) throw UsageError("--n: must be >= 1 (or give --rates / --rate-list)");
            if (!(gamma > 0.0) || !std::isfinite(gamma)) throw UsageError("--gamma: must be positive");
            spec = CascadeSpec::equal(n, gamma);
        }
        if (auto e = validate(spec)) throw UsageError("--rates: " + e->message);
        return spec;
    }
};

void check_pair(const std::pair<int, int>& p, int n_levels) {
    if (p.first < 0 || p.first >= n_levels || p.second < 0 || p.second >= n_levels) {
        throw UsageError("--pair: labels must lie in [0, " + std::to_string(n_levels) + ")");
    }
}

nlohmann::ordered_json spec_json(const CascadeSpec& spec) {
    return {{"n_levels", spec.n_levels}, {"rates", spec.rates}};
}

bool is_stdout(const std::string& path) { return path.empty() || path == "-"; }

class Session {
public:
    Session(std::string name, std::ostream& out) : name_(std::move(name)), out_(out) {}

    void param(const std::string& key, nlohmann::ordered_json value) { params_[key] = std::move(value); }
    void input(const std::string& path) { inputs_.push_back(path); }
    void seed(std::uint64_t s) { seed_ = s; }

    void emit(const std::string& path, const std::string& content) {
        if (is_stdout(path)) {
            out_ << content;
            return;
        }
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw CascadeError(ErrorKind::Io, "cannot open '" + path + "' for writing");
        f << content;
        if (!f) throw CascadeError(ErrorKind::Io, "write failed for '" + path + "'");
        outputs_.push_back(path);
    }

    void note_output(const std::string& path) { outputs_.push_back(path); }

    // Written next to the first output file: <output>.manifest.json.
    void finish(const std::optional<std::string>& manifest_path = std::nullopt) {
        if (outputs_.empty() && !manifest_path) return;
        const std::string path = manifest_path ? *manifest_path : outputs_.front() + ".manifest.json";
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        nlohmann::ordered_json j;
        j["subcommand"] = name_;
        j["parameters"] = params_;
        j["inputs"] = inputs_;
        j["outputs"] = outputs_;
        if (seed_) j["seed"] = *seed_;
        else j["seed"] = nullptr;
        j["version"] = kVersion;
        j["wall_clock_seconds"] = seconds;
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw CascadeError(ErrorKind::Io, "cannot write manifest '" + path + "'");
        f << j.dump(2) << '\n';
    }

private:
    std::string name_;
    std::ostream& out_;
    nlohmann::ordered_json params_ = nlohmann::ordered_json::object();
    std::vector<std::string> inputs_;
    std::vector<std::string> outputs_;
    std::optional<std::uint64_t> seed_;
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string trace_csv(const std::vector<double>& tau, const std::function<double(double)>& g) {
    std::vector<double> values(tau.size());
    parallel_for(tau.size(), worker_count(), [&](std::uint64_t i) { values[i] = g(tau[i]); });
    CorrelationTrace trace;
    trace.tau = tau;
    trace.g2 = std::move(values);
    std::ostringstream s;
    write_trace_csv(s, trace);
    return s.str();
}

std::string equal_pair_csv(int n_levels, int m, int n, double gamma, const Grid& grid) {
    return trace_csv(grid.points(), [&](double t) { return g2_equal_pair(n_levels, m, n, gamma, t); });
}

// --- subcommands -----------------------------------------------------------

struct AnalyticArgs {
    int n = 0;
    std::optional<int> k;
    std::string pair;
    double gamma = 1.0;
    std::string tau = "-10:10";
    int steps = 1000;
    std::string out = "-";
};

int cmd_analytic(const AnalyticArgs& a, std::ostream& out) {
    if (a.n < 1) throw UsageError("--n: must be >= 1");
    if (!(a.gamma > 0.0) || !std::isfinite(a.gamma)) throw UsageError("--gamma: must be positive");
    std::pair<int, int> p;
    if (a.k) {
        if (*a.k < 0 || *a.k >= a.n) throw UsageError("--k: must lie in [0, N)");
        p = {1 % a.n, *a.k};
    } else if (!a.pair.empty()) {
        p = parse_pair(a.pair);
        check_pair(p, a.n);
    } else {
        throw UsageError("--k or --pair is required");
    }
    const Grid grid = parse_grid(a.tau, a.steps, "--tau");
    Session s("analytic", out);
    s.param("n", a.n);
    s.param("pair", {p.first, p.second});
    s.param("gamma", a.gamma);
    s.param("tau", a.tau);
    s.param("steps", a.steps);
    s.emit(a.out, equal_pair_csv(a.n, p.first, p.second, a.gamma, grid));
    s.finish();
    return kOk;
}

struct GeneralArgs {
    SpecArgs spec;
    std::string pair;
    std::string tau = "-10:10";
    int steps = 1000;
    std::string out = "-";
};

int cmd_general(const GeneralArgs& a, std::ostream& out) {
    if (a.spec.rates_file.empty() && a.spec.rate_list.empty()) throw UsageError("--rates or --rate-list is required");
    const CascadeSpec spec = a.spec.build();
    if (a.pair.empty()) throw UsageError("--pair is required");
    const auto p = parse_pair(a.pair);
    check_pair(p, spec.n_levels);
    const Grid grid = parse_grid(a.tau, a.steps, "--tau");
    const Propagator prop(spec);
    const auto tau = grid.points();
    if (spec.n_levels == 3) {
        const auto named = ThreeLevelRates::from_spec(spec);
        for (double t : tau) {
            const double closed = g2_three_level(named, p.first, p.second, t);
            const double general = prop.g2(p.first, p.second, t);
            if (!(std::abs(closed - general) <= 1e-6)) {
                throw ConsistencyError("closed form and propagation disagree at tau=" + fmt17(t) + ": " +
                                       fmt17(closed) + " vs " + fmt17(general));
            }
        }
    }
    Session s("general", out);
    if (!a.spec.rates_file.empty()) s.input(a.spec.rates_file);
    s.param("spec", spec_json(spec));
    s.param("pair", {p.first, p.second});
    s.param("tau", a.tau);
    s.param("steps", a.steps);
    s.emit(a.out, trace_csv(tau, [&](double t) { return prop.g2(p.first, p.second, t); }));
    s.finish();
    return kOk;
}

struct SimulateArgs {
    SpecArgs spec;
    std::optional<double> events;
    std::optional<double> duration;
    std::uint64_t seed = 0;
    double burn_in = 0.0;
    bool binary = false;
    std::string out;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    SimConfig cfg;
    cfg.spec = a.spec.build();
    cfg.seed = a.seed;
    cfg.burn_in = a.burn_in;
    if (a.events.has_value() == a.duration.has_value()) throw UsageError("exactly one of --events, --duration is required");
    if (a.events) {
        const double e = *a.events;
        if (!(e >= 1.0) || e != std::floor(e) || e > 1e15) throw UsageError("--events: must be a positive integer");
        cfg.stop = StopAtEvents{static_cast<std::uint64_t>(e)};
    } else {
        if (!(*a.duration > 0.0) || !std::isfinite(*a.duration)) throw UsageError("--duration: must be positive");
        cfg.stop = StopAtDuration{*a.duration};
    }
    if (!(a.burn_in >= 0.0) || !std::isfinite(a.burn_in)) throw UsageError("--burn-in: must be >= 0");
    if (is_stdout(a.out)) throw UsageError("--out: a file path is required");
    const EventStream stream = simulate(cfg);
    Session s("simulate", out);
    s.param("spec", spec_json(cfg.spec));
    if (a.events) s.param("events", *a.events);
    if (a.duration) s.param("duration", *a.duration);
    s.param("burn_in", a.burn_in);
    s.param("binary", a.binary);
    s.seed(a.seed);
    save_events(a.out, stream, a.binary);
    s.note_output(a.out);
    s.finish();
    return kOk;
}

struct CorrelateArgs {
    std::string in;
    std::string pair;
    std::string subset;
    double bin = 0.05;
    double taumax = 10.0;
    int bootstrap = 0;
    int resamples = 200;
    std::uint64_t seed = 1;
    std::string out = "-";
};

int cmd_correlate(const CorrelateArgs& a, std::ostream& out) {
    if (a.in.empty()) throw UsageError("--in is required");
    if (a.pair.empty() == a.subset.empty()) throw UsageError("exactly one of --pair, --subset is required");
    const EventStream stream = load_events(a.in);
    HistogramConfig cfg{a.bin, a.taumax};
    try {
        check_histogram(cfg, stream.duration);
    } catch (const CascadeError& e) {
        throw UsageError(std::string("--bin/--taumax: ") + e.what());
    }
    CorrelationTrace trace;
    Session s("correlate", out);
    s.input(a.in);
    if (!a.pair.empty()) {
        const auto p = parse_pair(a.pair);
        check_pair(p, stream.n_levels);
        trace = correlate(stream, p.first, p.second, cfg);
        if (a.bootstrap > 0) {
            trace.std_err = block_bootstrap_stderr(stream, p.first, p.second, cfg, a.bootstrap, a.resamples, a.seed);
        }
        s.param("pair", {p.first, p.second});
    } else {
        const auto members = parse_ints(a.subset, "--subset");
        for (int l : members) {
            if (l < 0 || l >= stream.n_levels) throw UsageError("--subset: labels must lie in [0, N)");
        }
        if (a.bootstrap > 0) throw UsageError("--bootstrap: only supported with --pair");
        trace = correlate_subset(stream, SubsetSpec(members, stream.n_levels), cfg);
        s.param("subset", members);
    }
    s.param("bin", a.bin);
    s.param("taumax", a.taumax);
    s.param("bootstrap", a.bootstrap);
    if (a.bootstrap > 0) {
        s.param("resamples", a.resamples);
        s.seed(a.seed);
    }
    std::ostringstream csv;
    write_trace_csv(csv, trace);
    s.emit(a.out, csv.str());
    if (!is_stdout(a.out)) s.emit(a.out + ".json", trace_sidecar_json(trace, &cfg));
    s.finish();
    return kOk;
}

struct PeaksArgs {
    int n = 0;
    double gamma = 1.0;
    int k = 1;
    int orders = 1;
    bool cross = false;
    std::string out = "-";
    std::string csv;
};

int cmd_peaks(const PeaksArgs& a, std::ostream& out) {
    if (a.n < 1) throw UsageError("--n: must be >= 1");
    if (!(a.gamma > 0.0) || !std::isfinite(a.gamma)) throw UsageError("--gamma: must be positive");
    if (a.orders < 1) throw UsageError("--orders: must be >= 1");
    if (!a.cross && (a.k < 0 || a.k >= a.n)) throw UsageError("--k: must lie in [0, N)");
    const PeakReport r = a.cross ? find_peaks_cross(a.n, a.gamma, a.orders) : find_peaks(a.n, a.gamma, a.k, a.orders);
    Session s("peaks", out);
    s.param("n", a.n);
    s.param("gamma", a.gamma);
    if (!a.cross) s.param("k", a.k);
    s.param("orders", a.orders);
    s.param("cross", a.cross);
    s.emit(a.out, to_json(r));
    if (!a.csv.empty()) s.emit(a.csv, to_csv(r));
    s.finish();
    return kOk;
}

struct CsArgs {
    SpecArgs spec;
    std::string pair;
    std::string tau = "0.001:0.1";
    int steps = 99;
    std::string out = "-";
};

int cmd_cscheck(const CsArgs& a, std::ostream& out) {
    const CascadeSpec spec = a.spec.build();
    if (a.pair.empty()) throw UsageError("--pair is required");
    const auto p = parse_pair(a.pair);
    check_pair(p, spec.n_levels);
    if (p.first == p.second) throw UsageError("--pair: m and n must differ");
    const Grid grid = parse_grid(a.tau, a.steps, "--tau");
    if (!(grid.lo > 0.0)) throw UsageError("--tau: samples must be positive");
    const auto r = cs_check(spec, p.first, p.second, grid.points());
    Session s("cscheck", out);
    s.param("spec", spec_json(spec));
    s.param("pair", {p.first, p.second});
    s.param("tau", a.tau);
    s.param("steps", a.steps);
    s.emit(a.out, to_json(r));
    s.finish();
    return kOk;
}

struct JumpArgs {
    SpecArgs spec;
    std::string pair;
    std::string out = "-";
};

int cmd_jump(const JumpArgs& a, std::ostream& out) {
    const CascadeSpec spec = a.spec.build();
    if (a.pair.empty()) throw UsageError("--pair is required");
    const auto p = parse_pair(a.pair);
    check_pair(p, spec.n_levels);
    Session s("jump", out);
    s.param("spec", spec_json(spec));
    s.param("pair", {p.first, p.second});
    s.emit(a.out, to_json(discontinuity(spec, p.first, p.second), p.first, p.second));
    s.finish();
    return kOk;
}

struct FigureArgs {
    std::string preset;
    std::string out_dir = ".";
};

std::string join(const std::string& dir, const std::string& file) {
    return (std::filesystem::path(dir) / file).string();
}

int cmd_figure(const FigureArgs& a, std::ostream& out) {
    std::error_code ec;
    std::filesystem::create_directories(a.out_dir, ec);
    if (ec) throw CascadeError(ErrorKind::Io, "cannot create '" + a.out_dir + "'");
    Session s("figure", out);
    s.param("preset", a.preset);
    if (a.preset == "fig1c") {
        // N = 6, gamma = 1: one trace per class, pair (1, k).
        const Grid grid{-15.0, 15.0, 3000};
        for (int k = 0; k < 6; ++k) {
            s.emit(join(a.out_dir, "fig1c_k" + std::to_string(k) + ".csv"), equal_pair_csv(6, 1, k, 1.0, grid));
        }
    } else if (a.preset == "fig2") {
        std::vector<PeakRequest> requests;
        for (int n = 3; n <= 50; ++n) requests.push_back({n, 1.0, 1, 8, false});
        for (int n = 3; n <= 50; ++n) requests.push_back({n, 1.0, 0, 7, true});
        const auto reports = find_peaks_many(requests);
        std::ostringstream auto_csv, cross_csv;
        auto_csv << "n,order,tau,g2\n";
        cross_csv << "n,order,tau,g2\n";
        for (const auto& r : reports) {
            auto& dst = r.cross ? cross_csv : auto_csv;
            for (const auto& p : r.peaks) {
                dst << r.n_levels << ',' << p.order << ',' << fmt17(p.tau) << ',' << fmt17(p.g2) << '\n';
            }
        }
        s.emit(join(a.out_dir, "fig2_auto.csv"), auto_csv.str());
        s.emit(join(a.out_dir, "fig2_cross.csv"), cross_csv.str());
    } else if (a.preset == "fig3") {
        // N = 25: contiguous, autocorrelation, next-to-contiguous, mid-ladder.
        const Grid grid{-60.0, 60.0, 2400};
        const std::vector<std::pair<std::string, int>> panels = {{"a", 0}, {"b", 1}, {"c", 24}, {"d", 13}};
        for (const auto& [panel, k] : panels) {
            s.emit(join(a.out_dir, "fig3" + panel + ".csv"), equal_pair_csv(25, 1, k, 1.0, grid));
        }
    } else if (a.preset == "fig4a") {
        const Grid grid{-60.0, 60.0, 2400};
        const SubsetSpec subset({1, 2}, 50);
        s.emit(join(a.out_dir, "fig4a.csv"),
               trace_csv(grid.points(), [&](double t) { return g2_subset(subset, 1.0, t); }));
    } else if (a.preset == "fig5") {
        const Grid grid{-20.0, 20.0, 4000};
        const ThreeLevelRates named{1.0, 1.1, 0.025};
        const Propagator unbalanced(named.to_spec());
        const double mean = named.sum() / 3.0;
        s.param("mean_rate", mean);
        s.emit(join(a.out_dir, "fig5_unbalanced.csv"),
               trace_csv(grid.points(), [&](double t) { return unbalanced.g2(2, 1, t); }));
        s.emit(join(a.out_dir, "fig5_equal.csv"), equal_pair_csv(3, 2, 1, mean, grid));
    } else {
        throw UsageError("--preset: unknown preset '" + a.preset + "'");
    }
    s.finish(join(a.out_dir, a.preset + ".manifest.json"));
    return kOk;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Io:
            return kIo;
        case ErrorKind::InsufficientSamples:
        case ErrorKind::EmptyChannel:
        case ErrorKind::NoPeaksFound:
            return kNoData;
        case ErrorKind::NumericalFailure:
        case ErrorKind::ImaginaryResidue:
            return kConsistency;
        default:
            return kUsage;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Correlation functions of N-level cascades", "cascade"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    AnalyticArgs analytic;
    auto* c_analytic = app.add_subcommand("analytic", "equal-rate closed form over a tau grid");
    c_analytic->add_option("--n", analytic.n, "number of levels")->required();
    c_analytic->add_option("--k", analytic.k, "trace class, same as --pair 1,K");
    c_analytic->add_option("--pair", analytic.pair, "transition pair m,n");
    c_analytic->add_option("--gamma", analytic.gamma)->capture_default_str();
    c_analytic->add_option("--tau", analytic.tau, "lo:hi")->capture_default_str();
    c_analytic->add_option("--steps", analytic.steps)->capture_default_str();
    c_analytic->add_option("--out", analytic.out)->capture_default_str();

    GeneralArgs general;
    auto* c_general = app.add_subcommand("general", "arbitrary rates by propagation");
    general.spec.attach(c_general);
    c_general->add_option("--pair", general.pair);
    c_general->add_option("--tau", general.tau)->capture_default_str();
    c_general->add_option("--steps", general.steps)->capture_default_str();
    c_general->add_option("--out", general.out)->capture_default_str();

    SimulateArgs simulate_args;
    auto* c_simulate = app.add_subcommand("simulate", "Monte Carlo photon stream");
    simulate_args.spec.attach(c_simulate);
    c_simulate->add_option("--events", simulate_args.events, "stop after this many events");
    c_simulate->add_option("--duration", simulate_args.duration, "stop at this time");
    c_simulate->add_option("--seed", simulate_args.seed)->capture_default_str();
    c_simulate->add_option("--burn-in", simulate_args.burn_in)->capture_default_str();
    c_simulate->add_flag("--binary", simulate_args.binary, "binary event format");
    c_simulate->add_option("--out", simulate_args.out)->required();

    CorrelateArgs corr;
    auto* c_corr = app.add_subcommand("correlate", "coincidence histogram of an event file");
    c_corr->add_option("--in", corr.in)->required();
    c_corr->add_option("--pair", corr.pair);
    c_corr->add_option("--subset", corr.subset, "comma-separated transition labels");
    c_corr->add_option("--bin", corr.bin)->capture_default_str();
    c_corr->add_option("--taumax", corr.taumax)->capture_default_str();
    c_corr->add_option("--bootstrap", corr.bootstrap, "block count for bootstrap errors, 0 = Poisson")
        ->capture_default_str();
    c_corr->add_option("--resamples", corr.resamples)->capture_default_str();
    c_corr->add_option("--seed", corr.seed, "bootstrap seed")->capture_default_str();
    c_corr->add_option("--out", corr.out)->capture_default_str();

    PeaksArgs peaks;
    auto* c_peaks = app.add_subcommand("peaks", "oscillation maxima of equal-rate traces");
    c_peaks->add_option("--n", peaks.n)->required();
    c_peaks->add_option("--gamma", peaks.gamma)->capture_default_str();
    c_peaks->add_option("--k", peaks.k)->capture_default_str();
    c_peaks->add_option("--orders", peaks.orders)->capture_default_str();
    c_peaks->add_flag("--cross", peaks.cross, "opposite-transition cross-correlation");
    c_peaks->add_option("--out", peaks.out)->capture_default_str();
    c_peaks->add_option("--csv", peaks.csv, "also write order,tau,g2");

    CsArgs cs;
    auto* c_cs = app.add_subcommand("cscheck", "Cauchy-Schwarz inequality check");
    cs.spec.attach(c_cs);
    c_cs->add_option("--pair", cs.pair);
    c_cs->add_option("--tau", cs.tau)->capture_default_str();
    c_cs->add_option("--steps", cs.steps)->capture_default_str();
    c_cs->add_option("--out", cs.out)->capture_default_str();

    JumpArgs jump;
    auto* c_jump = app.add_subcommand("jump", "one-sided limits at tau = 0");
    jump.spec.attach(c_jump);
    c_jump->add_option("--pair", jump.pair);
    c_jump->add_option("--out", jump.out)->capture_default_str();

    FigureArgs fig;
    auto* c_fig = app.add_subcommand("figure", "figure data presets");
    c_fig->add_option("--preset", fig.preset)->required()->check(CLI::IsMember({"fig1c", "fig2", "fig3", "fig4a", "fig5"}));
    c_fig->add_option("--out-dir", fig.out_dir)->capture_default_str();

    std::vector<std::string> argv_store{"cascade"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (*c_analytic) return cmd_analytic(analytic, out);
        if (*c_general) return cmd_general(general, out);
        if (*c_simulate) return cmd_simulate(simulate_args, out);
        if (*c_corr) return cmd_correlate(corr, out);
        if (*c_peaks) return cmd_peaks(peaks, out);
        if (*c_cs) return cmd_cscheck(cs, out);
        if (*c_jump) return cmd_jump(jump, out);
        if (*c_fig) return cmd_figure(fig, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ConsistencyError& e) {
        err << "error: " << e.what() << '\n';
        return kConsistency;
    } catch (const CascadeError& e) {
        nlohmann::ordered_json j{{"error", to_string(e.kind())}, {"message", e.what()}};
        err << j.dump() << '\n';
        return exit_code_for(e.kind());
    }
    return kUsage;
}

}  // namespace cascade::cli
