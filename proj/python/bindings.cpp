#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mibie/config.hpp"
#include "mibie/harness.hpp"
#include "mibie/kernels.hpp"
#include "mibie/params.hpp"
#include "mibie/specfun.hpp"

namespace py = pybind11;
using namespace mibie;

namespace {

harness::ExperimentConfig make_config(const std::map<std::string, std::string>& overrides) {
    config::KeyValues kv;
    for (const auto& [k, v] : overrides) kv.set(k, v);
    return config::apply(kv);
}

py::dict record_dict(const harness::ErrorRecord& r) {
    py::dict d;
    d["sweep"] = harness::sweep_name(r.sweep);
    d["method"] = formulations::method_name(r.method);
    d["p"] = r.p;
    d["qbx_order"] = r.qbx_order;
    d["n_panels"] = r.n_panels;
    d["nodes_per_panel"] = r.nodes_per_panel;
    d["n_nodes"] = r.n_nodes;
    d["h"] = r.h;
    d["err_t"] = r.err_t;
    d["err_p"] = r.err_p;
    d["iterations"] = r.iterations;
    d["converged"] = r.converged;
    d["wall_time"] = r.wall_time;
    d["error"] = r.error;
    return d;
}

py::dict cluster_dict(const harness::ClusterStats& st) {
    py::dict d;
    d["centers"] = st.centers;
    d["coverage"] = st.coverage;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Morse-Ingard boundary integral solver";

    py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<DegenerateError>(m, "DegenerateError", PyExc_ArithmeticError);
    py::register_exception<GeometryError>(m, "GeometryError", PyExc_RuntimeError);

    py::class_<GasParams>(m, "GasParams")
        .def(py::init([](double omega, double gamma, double lambda) { return GasParams{omega, gamma, lambda}; }),
             py::arg("omega"), py::arg("gamma"), py::arg("lambda_"))
        .def_readwrite("omega", &GasParams::omega)
        .def_readwrite("gamma", &GasParams::gamma)
        .def_readwrite("lambda_", &GasParams::lambda);

    py::class_<ModeConstants>(m, "ModeConstants")
        .def_readonly("q", &ModeConstants::q)
        .def_readonly("k_t", &ModeConstants::k_t)
        .def_readonly("k_p", &ModeConstants::k_p)
        .def_readonly("m_t", &ModeConstants::m_t)
        .def_readonly("m_p", &ModeConstants::m_p)
        .def_readonly("t_plus", &ModeConstants::t_plus)
        .def_readonly("t_minus", &ModeConstants::t_minus)
        .def_readonly("pairing_swapped", &ModeConstants::pairing_swapped);

    m.def("reference_params", &reference_params);
    m.def("derive_modes", &derive_modes, py::arg("params"));
    m.def(
        "transform_cond2", [](const GasParams& p) { return build_transform(derive_modes(p), p).cond2; },
        py::arg("params"));

    m.def(
        "bessel_jh",
        [](int order_max, cplx z) {
            const auto t = specfun::bessel_jh(order_max, z);
            return py::make_tuple(t.j, t.h1);
        },
        py::arg("order_max"), py::arg("z"), "J_0..J_n and H^(1)_0..H^(1)_n at z");
    m.def(
        "helmholtz_kernel_2d",
        [](cplx k, double r) {
            const auto v = kernels::helmholtz_kernel_2d(k, r);
            return py::make_tuple(v.value, v.dr);
        },
        py::arg("k"), py::arg("r"));

    m.def(
        "default_config", [] { return config::to_key_values(harness::ExperimentConfig{}).values(); },
        "every configuration key with its default value");
    m.def(
        "run_convergence",
        [](const std::string& sweep, const std::map<std::string, std::string>& overrides) {
            const auto cfg = make_config(overrides);
            std::vector<harness::ErrorRecord> recs;
            {
                py::gil_scoped_release release;
                recs = harness::run_convergence(cfg, harness::parse_sweep(sweep));
            }
            py::list out;
            for (const auto& r : recs) out.append(record_dict(r));
            return out;
        },
        py::arg("sweep"), py::arg("overrides") = std::map<std::string, std::string>{});
    m.def(
        "convergence_csv",
        [](const std::string& sweep, const std::map<std::string, std::string>& overrides) {
            const auto cfg = make_config(overrides);
            std::ostringstream os;
            harness::write_convergence_csv(os, cfg, harness::run_convergence(cfg, harness::parse_sweep(sweep)));
            return os.str();
        },
        py::arg("sweep"), py::arg("overrides") = std::map<std::string, std::string>{});
    m.def(
        "run_projection_sweep",
        [](const std::map<std::string, std::string>& overrides, bool thermal) {
            const auto cfg = make_config(overrides);
            const auto sw = harness::run_projection_sweep(
                cfg, thermal ? harness::Content::Full : harness::Content::AcousticOnly);
            py::dict d;
            py::list pts;
            for (const auto& p : sw.points) pts.append(py::make_tuple(p.distance, p.err_t, p.err_p));
            d["points"] = pts;
            d["slope_t"] = sw.slope_t;
            d["im_k_t"] = sw.im_k_t;
            d["iterations"] = sw.iterations;
            return d;
        },
        py::arg("overrides") = std::map<std::string, std::string>{}, py::arg("thermal") = true);
    m.def(
        "run_spectrum",
        [](const std::map<std::string, std::string>& overrides) {
            const auto s = harness::run_spectrum(make_config(overrides));
            py::dict d;
            d["dimension"] = s.dimension;
            d["unpreconditioned"] = s.unpreconditioned;
            d["preconditioned"] = s.preconditioned;
            d["unpreconditioned_stats"] = cluster_dict(s.unpreconditioned_stats);
            d["preconditioned_stats"] = cluster_dict(s.preconditioned_stats);
            return d;
        },
        py::arg("overrides") = std::map<std::string, std::string>{});
}
