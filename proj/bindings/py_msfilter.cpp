#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "msfilter/experiments.hpp"
#include "msfilter/linear_theory.hpp"
#include "msfilter/spekf.hpp"

namespace py = pybind11;
using namespace msf;

namespace {

SchemeTag scheme_from_string(const std::string& s) {
    if (s == "rsf") return SchemeTag::RSF;
    if (s == "rsfa") return SchemeTag::RSFA;
    if (s == "rsfc") return SchemeTag::RSFC;
    if (s == "rspekf") return SchemeTag::RSPEKF;
    throw std::invalid_argument("unknown scheme: " + s);
}

LinearVariantTag variant_from_string(const std::string& s) {
    if (s == "rsf") return LinearVariantTag::RSF;
    if (s == "rsfa") return LinearVariantTag::RSFA;
    if (s == "optimal") return LinearVariantTag::OPTIMAL;
    throw std::invalid_argument("unknown variant: " + s);
}

SpekfParams regime_params(int regime) {
    if (regime == 1) return spekf_regime1();
    if (regime == 2) return spekf_regime2();
    throw std::invalid_argument("regime must be 1 or 2");
}

}  // namespace

PYBIND11_MODULE(_msfilter, m) {
    m.doc() = "reduced stochastic filtering for multiscale systems";

    py::class_<LinearTwoScaleParams>(m, "LinearTwoScaleParams")
        .def(py::init<>())
        .def_readwrite("a11", &LinearTwoScaleParams::a11)
        .def_readwrite("a12", &LinearTwoScaleParams::a12)
        .def_readwrite("a21", &LinearTwoScaleParams::a21)
        .def_readwrite("a22", &LinearTwoScaleParams::a22)
        .def_readwrite("sigma_x", &LinearTwoScaleParams::sigma_x)
        .def_readwrite("sigma_y", &LinearTwoScaleParams::sigma_y)
        .def_readwrite("eps", &LinearTwoScaleParams::eps)
        .def_readwrite("r_obs", &LinearTwoScaleParams::r_obs);

    m.def("derived_coefficients", [](const LinearTwoScaleParams& p) {
        DerivedCoefficients d = derived_coefficients(p);
        return py::make_tuple(d.a_tilde, d.a_hat);
    });
    m.def("s11_expanded", &s11_expanded);
    m.def("solve_riccati_full", [](const LinearTwoScaleParams& p) {
        SteadyCovariance2x2 s = solve_riccati_full(p);
        return py::make_tuple(s.s11, s.s12, s.s22);
    });
    m.def("solve_riccati_reduced", &solve_riccati_reduced, py::arg("a"),
          py::arg("sigma_x_sq"), py::arg("r_obs"));
    m.def("manifold_sigma_sq", &manifold_sigma_sq);
    m.def("reduced_params_for", [](const LinearTwoScaleParams& p, const std::string& variant) {
        ReducedOUParams r = reduced_params_for(p, variant_from_string(variant));
        return py::make_tuple(r.a, r.sigma_x_sq);
    });
    m.def("msm_fit", [](double variance, double corr_time) {
        ReducedOUParams r = msm_fit(variance, corr_time);
        return py::make_tuple(r.a, r.sigma_x_sq);
    });
    m.def("equilibrium_stats", [](const LinearTwoScaleParams& p, bool expanded) {
        EquilibriumStats s =
            equilibrium_stats_linear(p, expanded ? StatsMode::Expanded : StatsMode::Exact);
        return py::make_tuple(s.c11, s.corr_time);
    }, py::arg("params"), py::arg("expanded") = false);

    m.def("spekf_reduced_params", [](int regime, const std::string& scheme) {
        ReducedSpekfParams r = reduced_params(regime_params(regime), scheme_from_string(scheme));
        py::dict d;
        d["alpha"] = r.alpha;
        d["beta_sq"] = r.beta_sq;
        d["sigma1_sq"] = r.sigma1_sq;
        d["sigma2_sq"] = r.sigma2_sq;
        return d;
    });
    m.def("spekf_stability_exponent", [](int regime, const std::string& scheme) {
        return stability_exponent(regime_params(regime), scheme_from_string(scheme));
    });

    m.def("list_experiments", []() {
        py::list out;
        for (const auto& e : list_experiments()) {
            py::dict d;
            d["id"] = e.id;
            d["description"] = e.description;
            d["runtime_estimate"] = e.runtime_estimate;
            out.append(d);
        }
        return out;
    });
    m.def("default_config", &default_config);
    m.def("validate_config", [](const std::string& text) {
        return validate_config(Config::parse_string(text));
    });
    m.def("run_experiment", [](const std::string& config_text, const std::string& out_dir,
                               int jobs) {
        ExperimentReport rep = run_experiment(Config::parse_string(config_text), out_dir, jobs);
        py::dict metrics;
        for (const auto& [k, v] : rep.metrics) metrics[py::str(k)] = v;
        py::dict d;
        d["experiment_id"] = rep.experiment_id;
        d["metrics"] = metrics;
        d["files"] = rep.files;
        d["content_hash"] = rep.content_hash;
        d["diverged"] = rep.diverged;
        return d;
    }, py::arg("config_text"), py::arg("out_dir"), py::arg("jobs") = 0);
}
