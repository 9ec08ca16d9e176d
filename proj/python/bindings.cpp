#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cascade/analysis.hpp"
#include "cascade/analytic_equal.hpp"
#include "cascade/estimator.hpp"
#include "cascade/spectral.hpp"
#include "cascade/stochastic.hpp"
#include "cascade/three_level.hpp"

namespace py = pybind11;
using namespace cascade;

namespace {

CascadeSpec make_spec(const std::vector<double>& rates) {
    return CascadeSpec{static_cast<int>(rates.size()), rates};
}

py::dict trace_dict(const CorrelationTrace& t) {
    py::dict d;
    d["tau"] = t.tau;
    d["g2"] = t.g2;
    d["std_err"] = t.std_err;
    return d;
}

}  // namespace

PYBIND11_MODULE(_cascade, m) {
    static PyObject* error_type = py::exception<CascadeError>(m, "CascadeError", PyExc_ValueError).ptr();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const CascadeError& e) {
            py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
            exc.attr("kind") = to_string(e.kind());
            PyErr_SetObject(error_type, exc.ptr());
        }
    });

    m.def("g2_equal", &g2_equal, py::arg("n_levels"), py::arg("k"), py::arg("gamma"), py::arg("tau"));
    m.def("g2_equal_pair", &g2_equal_pair, py::arg("n_levels"), py::arg("m"), py::arg("n"), py::arg("gamma"),
          py::arg("tau"));
    m.def(
        "g2_subset",
        [](int n_levels, std::vector<int> members, double gamma, double tau) {
            return g2_subset(SubsetSpec(std::move(members), n_levels), gamma, tau);
        },
        py::arg("n_levels"), py::arg("members"), py::arg("gamma"), py::arg("tau"));
    m.def("bundle_peak", &bundle_peak, py::arg("n_levels"), py::arg("subset_size"));

    m.def(
        "steady_state", [](const std::vector<double>& rates) { return steady_state(make_spec(rates)); },
        py::arg("rates"));
    m.def(
        "g2_general",
        [](const std::vector<double>& rates, int mm, int n, const std::vector<double>& tau) {
            const Propagator prop(make_spec(rates));
            std::vector<double> out;
            out.reserve(tau.size());
            for (double t : tau) out.push_back(prop.g2(mm, n, t));
            return out;
        },
        py::arg("rates"), py::arg("m"), py::arg("n"), py::arg("tau"));

    m.def(
        "g2_three_level",
        [](double pump, double first, double second, int mm, int n, double tau) {
            return g2_three_level(ThreeLevelRates{pump, first, second}, mm, n, tau);
        },
        py::arg("pump"), py::arg("first"), py::arg("second"), py::arg("m"), py::arg("n"), py::arg("tau"));
    m.def(
        "oscillation_condition",
        [](double g0, double g1, double g2) { return std::string(to_string(oscillation_condition(g0, g1, g2))); },
        py::arg("gamma0"), py::arg("gamma1"), py::arg("gamma2"));

    m.def(
        "find_peaks",
        [](int n_levels, double gamma, int k, int max_order, bool cross) {
            const auto r = cross ? find_peaks_cross(n_levels, gamma, max_order)
                                 : find_peaks(n_levels, gamma, k, max_order);
            py::list out;
            for (const auto& p : r.peaks) out.append(py::make_tuple(p.order, p.tau, p.g2));
            return out;
        },
        py::arg("n_levels"), py::arg("gamma") = 1.0, py::arg("k") = 1, py::arg("max_order") = 1,
        py::arg("cross") = false);
    m.def(
        "cs_check",
        [](const std::vector<double>& rates, int mm, int n, const std::vector<double>& tau) {
            const auto r = cs_check(make_spec(rates), mm, n, tau);
            py::dict d;
            d["lhs"] = r.lhs;
            d["tau"] = r.tau;
            d["rhs"] = r.rhs;
            d["violated"] = r.violated;
            d["infinite_ratio"] = r.infinite_ratio;
            d["max_ratio"] = r.max_ratio ? py::cast(*r.max_ratio) : py::none();
            return d;
        },
        py::arg("rates"), py::arg("m"), py::arg("n"), py::arg("tau"));
    m.def(
        "discontinuity",
        [](const std::vector<double>& rates, int mm, int n) {
            const auto d = discontinuity(make_spec(rates), mm, n);
            return py::make_tuple(d.left, d.right, d.jump);
        },
        py::arg("rates"), py::arg("m"), py::arg("n"));

    m.def(
        "simulate",
        [](const std::vector<double>& rates, std::uint64_t seed, std::uint64_t events) {
            SimConfig cfg;
            cfg.spec = make_spec(rates);
            cfg.seed = seed;
            cfg.stop = StopAtEvents{events};
            EventStream s;
            {
                py::gil_scoped_release release;
                s = simulate(cfg);
            }
            return py::make_tuple(s.channels, s.duration);
        },
        py::arg("rates"), py::arg("seed"), py::arg("events"));
    m.def(
        "correlate",
        [](const std::vector<double>& rates, std::uint64_t seed, std::uint64_t events, int mm, int n,
           double bin_width, double tau_max) {
            SimConfig cfg;
            cfg.spec = make_spec(rates);
            cfg.seed = seed;
            cfg.stop = StopAtEvents{events};
            CorrelationTrace t;
            {
                py::gil_scoped_release release;
                t = correlate(simulate(cfg), mm, n, HistogramConfig{bin_width, tau_max});
            }
            return trace_dict(t);
        },
        py::arg("rates"), py::arg("seed"), py::arg("events"), py::arg("m"), py::arg("n"),
        py::arg("bin_width") = 0.05, py::arg("tau_max") = 10.0);
}
