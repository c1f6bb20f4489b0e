#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "mibie/config.hpp"
#include "mibie/harness.hpp"
#include "mibie/params.hpp"

namespace {

using namespace mibie;

struct Common {
    std::string config_file;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config_file, "key = value configuration file");
    cmd->add_option("--set", c.overrides, "override one key, as key=value (repeatable)");
}

config::KeyValues gather(const Common& c) {
    config::KeyValues kv;
    if (!c.config_file.empty()) kv = config::KeyValues::load(c.config_file);
    for (const auto& o : c.overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos || eq == 0) throw ArgumentError("--set expects key=value, got '" + o + "'");
        kv.set(o.substr(0, eq), o.substr(eq + 1));
    }
    return kv;
}

std::string show(cplx z) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.10g%+.10gi", z.real(), z.imag());
    return buf;
}

void open_out(const std::string& path, std::ofstream& os) {
    os.open(path);
    if (!os) throw ArgumentError("cannot open output file '" + path + "'");
}

int run_params(const harness::ExperimentConfig& cfg) {
    const auto m = derive_modes(cfg.params);
    const auto tr = build_transform(m, cfg.params);
    std::printf("omega = %.16g\ngamma = %.16g\nlambda = %.16g\n", cfg.params.omega, cfg.params.gamma,
                cfg.params.lambda);
    std::printf("Q = %s\n", show(m.q).c_str());
    std::printf("k_t = %s\n", show(m.k_t).c_str());
    std::printf("k_p = %s\n", show(m.k_p).c_str());
    std::printf("m_t = %s\n", show(m.m_t).c_str());
    std::printf("m_p = %s\n", show(m.m_p).c_str());
    std::printf("t_plus = %s\n", show(m.t_plus).c_str());
    std::printf("t_minus = %s\n", show(m.t_minus).c_str());
    std::printf("pairing_swapped = %d\n", m.pairing_swapped ? 1 : 0);
    std::printf("boundary_layer = %.10g\n", 1.0 / std::abs(m.k_t.imag()));
    std::printf("cond2 = %.10g\n", tr.cond2);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thermoacoustic exterior Neumann solver harness"};
    app.require_subcommand(1);

    Common c_params, c_conv, c_solve, c_spec, c_proj;
    auto* params = app.add_subcommand("params", "print mode constants and the transform condition number");
    add_common(params, c_params);
    double omega = 0.0, gamma = 0.0, lambda = 0.0;
    params->add_option("--omega", omega, "Omega");
    params->add_option("--gamma", gamma, "gamma");
    params->add_option("--lambda", lambda, "Lambda");

    auto* conv = app.add_subcommand("convergence", "p- or h-convergence sweep");
    add_common(conv, c_conv);
    std::string mode = "p", conv_out;
    std::vector<std::string> methods;
    conv->add_option("--mode", mode, "p or h")->check(CLI::IsMember({"p", "h"}));
    conv->add_option("--method", methods, "coupled, coupled-precond, decoupled, projection (repeatable)");
    conv->add_option("--out", conv_out, "output CSV")->required();

    auto* solve = app.add_subcommand("solve", "solve once and evaluate fields on a volume grid");
    add_common(solve, c_solve);
    std::string curve, solve_out, solve_method;
    solve->add_option("--curve", curve, "circle, ellipse, fourier or apple");
    solve->add_option("--method", solve_method, "method used for the solve");
    solve->add_option("--out", solve_out, "output CSV")->required();

    auto* spec = app.add_subcommand("spectrum", "eigenvalues of the coupled matrices");
    add_common(spec, c_spec);
    std::string spec_out;
    spec->add_option("--out", spec_out, "output CSV")->required();

    auto* proj = app.add_subcommand("projection-sweep", "projection error against distance from the curve");
    add_common(proj, c_proj);
    std::string proj_out;
    proj->add_option("--out", proj_out, "output CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        auto progress = [](const harness::ErrorRecord& r) {
            std::fprintf(stderr, "%s p=%d panels=%d N=%d %-16s err_t=%.3e err_p=%.3e it=%d%s\n",
                         harness::sweep_name(r.sweep), r.p, r.n_panels, r.n_nodes,
                         formulations::method_name(r.method), r.err_t, r.err_p, r.iterations,
                         r.error.empty() ? "" : (" error: " + r.error).c_str());
        };
        if (params->parsed()) {
            auto kv = gather(c_params);
            if (params->count("--omega")) kv.set("omega", harness::format_number(omega));
            if (params->count("--gamma")) kv.set("gamma", harness::format_number(gamma));
            if (params->count("--lambda")) kv.set("lambda", harness::format_number(lambda));
            return run_params(config::apply(kv));
        }
        if (conv->parsed()) {
            auto kv = gather(c_conv);
            if (!methods.empty()) {
                std::string joined;
                for (const auto& m : methods) joined += (joined.empty() ? "" : ",") + m;
                kv.set("methods", joined);
            }
            const auto cfg = config::apply(kv);
            const auto sweep = harness::parse_sweep(mode);
            const auto records = harness::run_convergence(cfg, sweep, progress);
            std::ofstream os;
            open_out(conv_out, os);
            harness::write_convergence_csv(os, cfg, records);
            if (sweep == harness::Sweep::H)
                for (auto m : cfg.methods)
                    std::printf("%s eoc_t = %.4f\n", formulations::method_name(m), harness::fitted_order(records, m));
            return 0;
        }
        if (solve->parsed()) {
            auto kv = gather(c_solve);
            if (!curve.empty()) kv.set("curve", curve);
            if (!solve_method.empty()) kv.set("grid_method", solve_method);
            const auto cfg = config::apply(kv);
            const auto grid = harness::run_solve(cfg);
            std::ofstream os;
            open_out(solve_out, os);
            harness::write_grid_csv(os, cfg, grid);
            std::printf("points = %zu\nerr_t = %.6e\nerr_p = %.6e\niterations = %d\n", grid.points.size(),
                        grid.errors.err_t, grid.errors.err_p, grid.iterations);
            return 0;
        }
        if (spec->parsed()) {
            const auto cfg = config::apply(gather(c_spec));
            const auto res = harness::run_spectrum(cfg);
            std::ofstream os;
            open_out(spec_out, os);
            harness::write_spectrum_csv(os, cfg, res);
            std::printf("dimension = %d\n", res.dimension);
            std::printf("preconditioned coverage(1) = %.4f\n", res.preconditioned_stats.coverage.at(0));
            std::printf("unpreconditioned coverage(1) = %.4f\n", res.unpreconditioned_stats.coverage.at(0));
            if (res.unpreconditioned_stats.coverage.size() > 1)
                std::printf("unpreconditioned coverage(2) = %.4f\n", res.unpreconditioned_stats.coverage[1]);
            return 0;
        }
        if (proj->parsed()) {
            const auto cfg = config::apply(gather(c_proj));
            const auto res = harness::run_projection_sweep(cfg);
            std::ofstream os;
            open_out(proj_out, os);
            harness::write_projection_csv(os, cfg, res);
            for (const auto& p : res.points) std::printf("d = %-8g err_t = %.4e err_p = %.4e\n", p.distance, p.err_t, p.err_p);
            std::printf("slope_t = %.4f\nim_k_t = %.4f\n", res.slope_t, res.im_k_t);
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
