#include "mibie/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <variant>

#include "mibie/config.hpp"
#include "mibie/specfun.hpp"

namespace mibie::harness {

namespace {

using formulations::Discretization;

std::array<cplx, 2> hankel(cplx z) {
    if (z.imag() > 700.0) return {0.0, 0.0};
    return specfun::raw::hankel01(z);
}

// Centre and a radius of a disc inside the shape.
std::pair<Point2, double> inner_disc(const geometry::Shape& shape) {
    return std::visit(
        [](const auto& s) -> std::pair<Point2, double> {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, geometry::Circle>) {
                return {s.center, s.radius};
            } else if constexpr (std::is_same_v<S, geometry::Ellipse>) {
                return {s.center, std::min(s.a, s.b)};
            } else {
                double r = s.r0;
                for (double c : s.cos_coeffs) r -= std::abs(c);
                for (double c : s.sin_coeffs) r -= std::abs(c);
                return {s.center, std::max(r, 0.1 * s.r0)};
            }
        },
        shape);
}

geometry::PanelizedCurve make_curve(const ExperimentConfig& cfg, int panels, int q) {
    return geometry::build_curve({cfg.shape, panels, q});
}

}  // namespace

ManufacturedProblem::ManufacturedProblem(std::vector<Source> sources, const ModeConstants& modes,
                                         const GasParams& params, const geometry::PanelizedCurve& curve,
                                         Content content)
    : sources_(std::move(sources)), modes_(modes) {
    if (sources_.empty()) throw ArgumentError("manufactured problem needs at least one source");
    for (const auto& s : sources_) {
        if (!std::isfinite(s.position.x) || !std::isfinite(s.position.y))
            throw ArgumentError("source position is not finite");
        if (!(curve.closest_point(s.position).signed_distance < 0.0))
            throw ArgumentError("source lies outside or on the curve");
    }
    const auto b = kernels::greens_coefficients(kernels::Dim::Two, modes, params);
    b_acoustic_ = content == Content::ThermalOnly ? cplx(0.0) : b.acoustic;
    b_thermal_ = content == Content::AcousticOnly ? cplx(0.0) : b.thermal;
}

FieldPair ManufacturedProblem::exact(Point2 x) const {
    FieldPair f{0.0, 0.0};
    for (const auto& s : sources_) {
        const double r = norm(x - s.position);
        if (r == 0.0) throw DomainError("field evaluated at a source");
        const cplx ha = b_acoustic_ * hankel(modes_.k_p * r)[0];
        const cplx ht = b_thermal_ == cplx(0.0) ? cplx(0.0) : b_thermal_ * hankel(modes_.k_t * r)[0];
        f.t += s.strength * (ha + ht);
        f.p += s.strength * (modes_.m_p * ha + modes_.m_t * ht);
    }
    return f;
}

FieldPair ManufacturedProblem::exact_normal_derivative(Point2 x, Point2 n) const {
    FieldPair f{0.0, 0.0};
    for (const auto& s : sources_) {
        const Point2 d = x - s.position;
        const double r = norm(d);
        if (r == 0.0) throw DomainError("field evaluated at a source");
        const double dr = dot(d, n) / r;
        const cplx ha = -b_acoustic_ * modes_.k_p * hankel(modes_.k_p * r)[1] * dr;
        const cplx ht =
            b_thermal_ == cplx(0.0) ? cplx(0.0) : -b_thermal_ * modes_.k_t * hankel(modes_.k_t * r)[1] * dr;
        f.t += s.strength * (ha + ht);
        f.p += s.strength * (modes_.m_p * ha + modes_.m_t * ht);
    }
    return f;
}

FieldValues ManufacturedProblem::exact(std::span<const Point2> points) const {
    FieldValues out;
    out.t.resize(points.size());
    out.p.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto f = exact(points[i]);
        out.t[i] = f.t;
        out.p[i] = f.p;
    }
    return out;
}

formulations::NeumannData ManufacturedProblem::neumann(const geometry::PanelizedCurve& curve) const {
    formulations::NeumannData data;
    const int n = curve.size();
    data.g_t.resize(n);
    data.g_p.resize(n);
    for (int i = 0; i < n; ++i) {
        const auto f = exact_normal_derivative(curve.positions()[i], curve.normals()[i]);
        data.g_t[i] = f.t;
        data.g_p[i] = f.p;
    }
    return data;
}

std::vector<Source> default_sources(const geometry::Circle& circle) {
    const double r = 0.5 * circle.radius;
    const cplx strengths[3] = {1.0, cplx(0.0, 0.5), -0.25};
    std::vector<Source> out;
    for (int k = 0; k < 3; ++k) {
        const double a = 2.0 * kPi * k / 3.0;
        out.push_back({{circle.center.x + r * std::cos(a), circle.center.y + r * std::sin(a)}, strengths[k]});
    }
    return out;
}

ErrorPair error_norms(const FieldValues& computed, const FieldValues& exact, double guard) {
    const std::size_t n = exact.t.size();
    if (n == 0) throw ArgumentError("error norms need at least one point");
    if (exact.p.size() != n || computed.t.size() != n || computed.p.size() != n)
        throw ArgumentError("computed and exact fields differ in length");
    if (!(guard >= 0.0)) throw ArgumentError("guard must be non-negative");
    auto one = [&](const std::vector<cplx>& c, const std::vector<cplx>& e) {
        double mx = 0.0;
        for (const cplx& v : e) mx = std::max(mx, std::abs(v));
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ref = std::abs(e[i]);
            if (ref == 0.0 || ref < guard * mx) continue;
            err = std::max(err, std::abs(c[i] - e[i]) / ref);
        }
        return err;
    };
    return {one(computed.t, exact.t), one(computed.p, exact.p)};
}

const char* sweep_name(Sweep s) { return s == Sweep::P ? "p" : "h"; }

Sweep parse_sweep(std::string_view name) {
    if (name == "p") return Sweep::P;
    if (name == "h") return Sweep::H;
    throw ArgumentError("unknown sweep mode '" + std::string(name) + "'; expected p or h");
}

void validate(const ExperimentConfig& cfg) {
    validate(cfg.params);
    geometry::validate(geometry::CurveSpec{cfg.shape, std::max(cfg.n_panels, 4), 2});
    if (cfg.n_panels < 4) throw ArgumentError("panels must be at least 4");
    if (cfg.nodes_per_panel != 0 && cfg.nodes_per_panel < 2) throw ArgumentError("nodes_per_panel must be 0 or >= 2");
    if (cfg.p_values.empty()) throw ArgumentError("p_values is empty");
    for (int p : cfg.p_values)
        if (p < 1) throw ArgumentError("p values must be at least 1");
    if (cfg.h_order < 1) throw ArgumentError("h_order must be at least 1");
    if (cfg.h_panels.empty()) throw ArgumentError("h_panels is empty");
    for (int n : cfg.h_panels)
        if (n < 4) throw ArgumentError("h_panels entries must be at least 4");
    if (cfg.qbx_order < -1) throw ArgumentError("qbx_order must be -1 (automatic) or non-negative");
    quadrature::validate(qbx_config(cfg, std::max(cfg.qbx_order, 0)));
    if (cfg.methods.empty()) throw ArgumentError("methods is empty");
    if (!(cfg.tol > 0.0)) throw ArgumentError("tol must be positive");
    if (cfg.max_iter < 1) throw ArgumentError("max_iter must be positive");
    if (!(cfg.guard >= 0.0 && cfg.guard < 1.0)) throw ArgumentError("guard must lie in [0, 1)");
    if (cfg.proj_panels < 4 || cfg.proj_nodes < 2) throw ArgumentError("projection curve is too coarse");
    if (!(cfg.proj_source_depth > 0.0)) throw ArgumentError("proj_source_depth must be positive");
    if (cfg.proj_distances.empty()) throw ArgumentError("proj_distances is empty");
    for (double d : cfg.proj_distances)
        if (!(d > 0.0)) throw ArgumentError("projection distances must be positive");
    if (cfg.proj_points < 1) throw ArgumentError("proj_points must be positive");
    if (cfg.spec_panels < 4 || cfg.spec_nodes < 2) throw ArgumentError("spectrum curve is too coarse");
    if (cfg.spec_qbx_order < 0) throw ArgumentError("spec_qbx_order must be non-negative");
    if (!(cfg.cluster_radius > 0.0)) throw ArgumentError("cluster_radius must be positive");
    if (cfg.grid_n < 2) throw ArgumentError("grid_n must be at least 2");
    if (!(cfg.grid_max > cfg.grid_min)) throw ArgumentError("grid_max must exceed grid_min");
    if (!(cfg.grid_exclusion >= 0.0)) throw ArgumentError("grid_exclusion must be non-negative");
}

quadrature::QbxConfig qbx_config(const ExperimentConfig& cfg, int order) {
    quadrature::QbxConfig q;
    q.order = order;
    q.upsample = cfg.upsample;
    q.radius_factor = cfg.radius_factor;
    q.kr_cap = cfg.kr_cap;
    return q;
}

std::vector<Source> resolve_sources(const ExperimentConfig& cfg) {
    if (!cfg.sources.empty()) return cfg.sources;
    const auto [c, r] = inner_disc(cfg.shape);
    return default_sources(geometry::Circle{c, r});
}

std::vector<ErrorRecord> run_convergence(const ExperimentConfig& cfg, Sweep sweep, const Progress& progress) {
    validate(cfg);
    struct Level {
        int p, order, panels, q;
    };
    std::vector<Level> levels;
    if (sweep == Sweep::P) {
        for (int p : cfg.p_values)
            levels.push_back({p, cfg.qbx_order >= 0 ? cfg.qbx_order : p, cfg.n_panels,
                              cfg.nodes_per_panel > 0 ? cfg.nodes_per_panel : p + 1});
    } else {
        const int p = cfg.h_order;
        for (int n : cfg.h_panels)
            levels.push_back({p, cfg.qbx_order >= 0 ? cfg.qbx_order : p + 4, n,
                              cfg.nodes_per_panel > 0 ? cfg.nodes_per_panel : p + 1});
    }
    const auto sources = resolve_sources(cfg);
    formulations::SolveOptions opts{cfg.tol, cfg.max_iter};
    std::vector<ErrorRecord> out;
    for (const auto& lv : levels) {
        const Discretization disc(make_curve(cfg, lv.panels, lv.q), cfg.params, qbx_config(cfg, lv.order));
        const ManufacturedProblem prob(sources, disc.modes(), cfg.params, disc.curve());
        const auto data = prob.neumann(disc.curve());
        const auto exact = prob.exact(disc.curve().positions());
        for (Method m : cfg.methods) {
            ErrorRecord rec;
            rec.sweep = sweep;
            rec.method = m;
            rec.p = lv.p;
            rec.qbx_order = lv.order;
            rec.n_panels = lv.panels;
            rec.nodes_per_panel = lv.q;
            rec.n_nodes = disc.size();
            rec.h = disc.curve().max_panel_length();
            try {
                const auto sol = formulations::solve(disc, data, m, opts);
                const auto fields = formulations::boundary_fields(disc, sol);
                const auto e = error_norms(fields, exact, cfg.guard);
                rec.err_t = e.err_t;
                rec.err_p = e.err_p;
                rec.iterations = sol.iterations;
                rec.converged = sol.converged;
                rec.wall_time = sol.wall_time;
            } catch (const std::exception& ex) {
                rec.converged = false;
                rec.err_t = rec.err_p = NAN;
                rec.error = ex.what();
            }
            if (progress) progress(rec);
            out.push_back(rec);
        }
    }
    return out;
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ArgumentError("slope fit needs at least two paired points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) throw ArgumentError("slope fit needs distinct abscissae");
    return sxy / sxx;
}

double fitted_order(const std::vector<ErrorRecord>& records, Method method, bool pressure) {
    std::vector<double> x, y;
    for (const auto& r : records) {
        if (r.method != method) continue;
        const double e = pressure ? r.err_p : r.err_t;
        if (!(e > 0.0) || !std::isfinite(e)) continue;
        x.push_back(std::log(r.h));
        y.push_back(std::log(e));
    }
    return fit_slope(x, y);
}

std::vector<Point2> offset_curve(const geometry::Shape& shape, double distance, int n) {
    std::vector<Point2> out(n);
    for (int i = 0; i < n; ++i) {
        const auto s = geometry::sample(shape, 2.0 * kPi * i / n);
        out[i] = s.x + distance * geometry::outward_normal(s);
    }
    return out;
}

ProjectionSweep run_projection_sweep(const ExperimentConfig& cfg, Content content) {
    validate(cfg);
    const int order = cfg.qbx_order >= 0 ? cfg.qbx_order : cfg.proj_nodes + 3;
    const Discretization disc(make_curve(cfg, cfg.proj_panels, cfg.proj_nodes), cfg.params, qbx_config(cfg, order));
    const auto s0 = geometry::sample(cfg.shape, 0.0);
    const Point2 src = s0.x - cfg.proj_source_depth * geometry::outward_normal(s0);
    const ManufacturedProblem prob({{src, 1.0}}, disc.modes(), cfg.params, disc.curve(), content);
    const auto sol = formulations::solve_projection(disc, prob.neumann(disc.curve()), {cfg.tol, cfg.max_iter});
    ProjectionSweep out;
    out.im_k_t = disc.modes().k_t.imag();
    out.iterations = sol.iterations;
    std::vector<double> xs, ys;
    for (double d : cfg.proj_distances) {
        const auto pts = offset_curve(cfg.shape, d, cfg.proj_points);
        const auto got = formulations::reconstruct_fields(disc, sol, pts);
        const auto ref = prob.exact(pts);
        double et = 0.0, ep = 0.0, mt = 0.0, mp = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            et = std::max(et, std::abs(got.t[i] - ref.t[i]));
            ep = std::max(ep, std::abs(got.p[i] - ref.p[i]));
            mt = std::max(mt, std::abs(ref.t[i]));
            mp = std::max(mp, std::abs(ref.p[i]));
        }
        DecayPoint dp{d, mt > 0.0 ? et / mt : et, mp > 0.0 ? ep / mp : ep};
        out.points.push_back(dp);
        if (d <= out.fit_max && dp.err_t > 0.0) {
            xs.push_back(d);
            ys.push_back(std::log(dp.err_t));
        }
    }
    out.slope_t = xs.size() >= 2 ? fit_slope(xs, ys) : NAN;
    return out;
}

int ClusterStats::centers_for(double fraction) const {
    for (std::size_t i = 0; i < coverage.size(); ++i)
        if (coverage[i] >= fraction) return static_cast<int>(i) + 1;
    return -1;
}

ClusterStats cluster_coverage(std::span<const cplx> values, double radius, int max_centers) {
    ClusterStats st;
    const std::size_t n = values.size();
    if (n == 0) return st;
    std::vector<char> covered(n, 0);
    std::size_t total = 0;
    for (int c = 0; c < max_centers && total < n; ++c) {
        std::size_t best = 0, best_count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t cnt = 0;
            for (std::size_t j = 0; j < n; ++j)
                if (!covered[j] && std::abs(values[j] - values[i]) <= radius) ++cnt;
            if (cnt > best_count) {
                best_count = cnt;
                best = i;
            }
        }
        for (std::size_t j = 0; j < n; ++j)
            if (!covered[j] && std::abs(values[j] - values[best]) <= radius) covered[j] = 1;
        total += best_count;
        st.centers.push_back(values[best]);
        st.coverage.push_back(static_cast<double>(total) / static_cast<double>(n));
    }
    return st;
}

SpectrumResult run_spectrum(const ExperimentConfig& cfg) {
    validate(cfg);
    const Discretization disc(make_curve(cfg, cfg.spec_panels, cfg.spec_nodes), cfg.params,
                              qbx_config(cfg, cfg.spec_qbx_order));
    const int n = disc.size();
    if (2 * n > solver::kSpectrumMaxSize) throw ArgumentError("coupled matrix exceeds the spectrum size guard");
    formulations::NeumannData zero{std::vector<cplx>(n), std::vector<cplx>(n)};
    SpectrumResult out;
    out.dimension = 2 * n;
    out.unpreconditioned = solver::spectrum(formulations::CoupledSystem(disc, zero, false).dense());
    out.preconditioned = solver::spectrum(formulations::CoupledSystem(disc, zero, true).dense());
    out.unpreconditioned_stats = cluster_coverage(out.unpreconditioned, cfg.cluster_radius);
    out.preconditioned_stats = cluster_coverage(out.preconditioned, cfg.cluster_radius);
    return out;
}

std::vector<Point2> volume_grid(const ExperimentConfig& cfg, const geometry::PanelizedCurve& curve) {
    std::vector<Point2> pts;
    const double step = (cfg.grid_max - cfg.grid_min) / (cfg.grid_n - 1);
    for (int j = 0; j < cfg.grid_n; ++j)
        for (int i = 0; i < cfg.grid_n; ++i) {
            const Point2 x{cfg.grid_min + i * step, cfg.grid_min + j * step};
            if (curve.closest_point(x).signed_distance > cfg.grid_exclusion) pts.push_back(x);
        }
    return pts;
}

GridResult run_solve(const ExperimentConfig& cfg) {
    validate(cfg);
    const int q = cfg.nodes_per_panel > 0 ? cfg.nodes_per_panel : 8;
    const int order = cfg.qbx_order >= 0 ? cfg.qbx_order : q + 3;
    const Discretization disc(make_curve(cfg, cfg.n_panels, q), cfg.params, qbx_config(cfg, order));
    const ManufacturedProblem prob(resolve_sources(cfg), disc.modes(), cfg.params, disc.curve());
    const auto sol = formulations::solve(disc, prob.neumann(disc.curve()), cfg.grid_method, {cfg.tol, cfg.max_iter});
    GridResult out;
    out.points = volume_grid(cfg, disc.curve());
    out.computed = formulations::reconstruct_fields(disc, sol, out.points);
    out.exact = prob.exact(out.points);
    out.errors = error_norms(out.computed, out.exact, cfg.guard);
    out.iterations = sol.iterations;
    return out;
}

std::string format_number(double x) {
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

void write_csv(std::ostream& os, const Metadata& meta, const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows) {
    for (const auto& [k, v] : meta) os << "# " << k << " = " << v << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& r : rows) {
        if (r.size() != columns.size()) throw ArgumentError("CSV row width does not match the header");
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << '\n';
    }
}

namespace {

Metadata config_metadata(const ExperimentConfig& cfg, const std::string& experiment) {
    Metadata meta{{"experiment", experiment}};
    const auto kv = config::to_key_values(cfg);
    for (const auto& [k, v] : kv.values()) meta.emplace_back(k, v);
    return meta;
}

std::string fmt(int v) { return std::to_string(v); }
std::string fmt(double v) { return format_number(v); }

}  // namespace

void write_convergence_csv(std::ostream& os, const ExperimentConfig& cfg, const std::vector<ErrorRecord>& records) {
    std::vector<std::vector<std::string>> rows;
    Sweep sweep = records.empty() ? Sweep::P : records.front().sweep;
    for (const auto& r : records)
        rows.push_back({sweep_name(r.sweep), formulations::method_name(r.method), fmt(r.p), fmt(r.qbx_order),
                        fmt(r.n_panels), fmt(r.nodes_per_panel), fmt(r.n_nodes), fmt(r.h), fmt(r.err_t),
                        fmt(r.err_p), fmt(r.iterations), r.converged ? "1" : "0", fmt(r.wall_time)});
    auto meta = config_metadata(cfg, std::string("convergence-") + sweep_name(sweep));
    if (sweep == Sweep::H && !records.empty()) {
        for (Method m : cfg.methods) {
            try {
                meta.emplace_back(std::string("eoc_t.") + formulations::method_name(m),
                                  format_number(fitted_order(records, m)));
            } catch (const ArgumentError&) {
            }
        }
    }
    write_csv(os, meta,
              {"sweep", "method", "p", "qbx_order", "n_panels", "nodes_per_panel", "n_nodes", "h", "err_t", "err_p",
               "iterations", "converged", "wall_time"},
              rows);
}

void write_projection_csv(std::ostream& os, const ExperimentConfig& cfg, const ProjectionSweep& sweep) {
    auto meta = config_metadata(cfg, "projection-sweep");
    meta.emplace_back("slope_t", format_number(sweep.slope_t));
    meta.emplace_back("im_k_t", format_number(sweep.im_k_t));
    meta.emplace_back("fit_max", format_number(sweep.fit_max));
    meta.emplace_back("iterations", fmt(sweep.iterations));
    std::vector<std::vector<std::string>> rows;
    for (const auto& p : sweep.points) rows.push_back({fmt(p.distance), fmt(p.err_t), fmt(p.err_p)});
    write_csv(os, meta, {"distance", "err_t", "err_p"}, rows);
}

void write_spectrum_csv(std::ostream& os, const ExperimentConfig& cfg, const SpectrumResult& spec) {
    auto meta = config_metadata(cfg, "spectrum");
    meta.emplace_back("dimension", fmt(spec.dimension));
    auto stats = [&](const std::string& name, const ClusterStats& st) {
        for (std::size_t i = 0; i < st.centers.size(); ++i) {
            meta.emplace_back(name + ".center" + fmt(static_cast<int>(i + 1)),
                              format_number(st.centers[i].real()) + " " + format_number(st.centers[i].imag()));
            meta.emplace_back(name + ".coverage" + fmt(static_cast<int>(i + 1)), format_number(st.coverage[i]));
        }
    };
    stats("unpreconditioned", spec.unpreconditioned_stats);
    stats("preconditioned", spec.preconditioned_stats);
    std::vector<std::vector<std::string>> rows;
    auto add = [&](const std::string& name, const std::vector<cplx>& ev) {
        for (std::size_t i = 0; i < ev.size(); ++i)
            rows.push_back({name, fmt(static_cast<int>(i)), fmt(ev[i].real()), fmt(ev[i].imag())});
    };
    add("unpreconditioned", spec.unpreconditioned);
    add("preconditioned", spec.preconditioned);
    write_csv(os, meta, {"matrix", "index", "re", "im"}, rows);
}

void write_grid_csv(std::ostream& os, const ExperimentConfig& cfg, const GridResult& grid) {
    auto meta = config_metadata(cfg, "solve");
    meta.emplace_back("err_t", format_number(grid.errors.err_t));
    meta.emplace_back("err_p", format_number(grid.errors.err_p));
    meta.emplace_back("iterations", fmt(grid.iterations));
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        const cplx t = grid.computed.t[i], p = grid.computed.p[i], te = grid.exact.t[i], pe = grid.exact.p[i];
        rows.push_back({fmt(grid.points[i].x), fmt(grid.points[i].y), fmt(t.real()), fmt(t.imag()), fmt(p.real()),
                        fmt(p.imag()), fmt(te.real()), fmt(te.imag()), fmt(pe.real()), fmt(pe.imag())});
    }
    write_csv(os, meta,
              {"x", "y", "t_re", "t_im", "p_re", "p_im", "t_exact_re", "t_exact_im", "p_exact_re", "p_exact_im"},
              rows);
}

}  // namespace mibie::harness
