#include "mibie/formulations.hpp"

#include <chrono>
#include <string>

namespace mibie::formulations {

namespace {

using quadrature::BoundaryOperator;
using quadrature::Kind;

void matvec(const BoundaryOperator& op, const cplx* in, cplx* out) {
    const Eigen::Index n = op.matrix.rows();
    Eigen::Map<Eigen::VectorXcd>(out, n).noalias() = op.matrix * Eigen::Map<const Eigen::VectorXcd>(in, n);
}

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

Method parse_method(std::string_view name) {
    if (name == "coupled") return Method::Coupled;
    if (name == "coupled-precond") return Method::CoupledPreconditioned;
    if (name == "decoupled") return Method::Decoupled;
    if (name == "projection") return Method::Projection;
    throw ArgumentError("unknown method '" + std::string(name) +
                        "'; expected coupled, coupled-precond, decoupled or projection");
}

const char* method_name(Method method) {
    switch (method) {
        case Method::Coupled:
            return "coupled";
        case Method::CoupledPreconditioned:
            return "coupled-precond";
        case Method::Decoupled:
            return "decoupled";
        case Method::Projection:
            return "projection";
    }
    return "?";
}

void validate(const NeumannData& data, int n) {
    if (static_cast<int>(data.g_t.size()) != n || static_cast<int>(data.g_p.size()) != n)
        throw ArgumentError("Neumann data length does not match node count " + std::to_string(n));
    for (int i = 0; i < n; ++i)
        if (!finite(data.g_t[i]) || !finite(data.g_p[i])) throw ArgumentError("Neumann data are not finite");
}

Discretization::Discretization(geometry::PanelizedCurve curve, const GasParams& params,
                               const quadrature::QbxConfig& cfg)
    : curve_(std::move(curve)), params_(params), cfg_(cfg), cache_(new Cached[4]) {
    validate(params_);
    quadrature::validate(cfg_);
    modes_ = derive_modes(params_);
    transform_ = build_transform(modes_, params_);
}

const BoundaryOperator& Discretization::cached(Cached& slot, Mode mode, Kind kind) const {
    std::call_once(slot.once, [&] {
        slot.op = quadrature::qbx_onesided_matrix(wavenumber(mode), curve_, cfg_, kind);
    });
    return *slot.op;
}

const BoundaryOperator& Discretization::normal_operator(Mode mode) const {
    return cached(cache_[mode == Mode::Thermal ? 0 : 1], mode, Kind::dSdn);
}

const BoundaryOperator& Discretization::single_layer(Mode mode) const {
    return cached(cache_[mode == Mode::Thermal ? 2 : 3], mode, Kind::S);
}

CoupledSystem::CoupledSystem(const Discretization& disc, const NeumannData& data, bool precondition)
    : disc_(disc), n_(disc.size()), precondition_(precondition),
      jump_(kernels::jump_coefficients(kernels::Dim::Two, disc.modes())) {
    validate(data, n_);
    const cplx det = jump_.determinant();
    const double scale = std::abs(jump_.c1 * jump_.d2) + std::abs(jump_.c2 * jump_.d1);
    if (!(std::abs(det) > 1e-12 * scale)) throw DegenerateError("jump matrix is singular");
    rhs_.resize(2 * n_);
    std::copy(data.g_t.begin(), data.g_t.end(), rhs_.begin());
    std::copy(data.g_p.begin(), data.g_p.end(), rhs_.begin() + n_);
    if (precondition_) block_solve(rhs_);
    disc_.normal_operator(Mode::Thermal);
    disc_.normal_operator(Mode::Acoustic);
}

void CoupledSystem::block_solve(std::span<cplx> v) const {
    if (static_cast<int>(v.size()) != 2 * n_) throw ArgumentError("block vector has the wrong length");
    // (-1/2 C)^{-1} = -2 / det [[d2, -c2], [-d1, c1]]
    const cplx f = -2.0 / jump_.determinant();
    for (int i = 0; i < n_; ++i) {
        const cplx a = v[i], b = v[n_ + i];
        v[i] = f * (jump_.d2 * a - jump_.c2 * b);
        v[n_ + i] = f * (-jump_.d1 * a + jump_.c1 * b);
    }
}

void CoupledSystem::apply(std::span<const cplx> in, std::span<cplx> out) const {
    if (static_cast<int>(in.size()) != 2 * n_ || static_cast<int>(out.size()) != 2 * n_)
        throw ArgumentError("block vector has the wrong length");
    std::vector<cplx> a(n_), b(n_);
    matvec(disc_.normal_operator(Mode::Thermal), in.data(), a.data());
    matvec(disc_.normal_operator(Mode::Acoustic), in.data() + n_, b.data());
    for (int i = 0; i < n_; ++i) {
        out[i] = jump_.c1 * a[i] + jump_.c2 * b[i];
        out[n_ + i] = jump_.d1 * a[i] + jump_.d2 * b[i];
    }
    if (precondition_) block_solve(out);
}

Eigen::MatrixXcd CoupledSystem::dense() const {
    const auto& at = disc_.normal_operator(Mode::Thermal).matrix;
    const auto& ap = disc_.normal_operator(Mode::Acoustic).matrix;
    cplx k11 = jump_.c1, k12 = jump_.c2, k21 = jump_.d1, k22 = jump_.d2;
    if (precondition_) {
        const cplx f = -2.0 / jump_.determinant();
        const cplx i11 = f * jump_.d2, i12 = -f * jump_.c2, i21 = -f * jump_.d1, i22 = f * jump_.c1;
        k11 = i11 * jump_.c1 + i12 * jump_.d1;
        k12 = i11 * jump_.c2 + i12 * jump_.d2;
        k21 = i21 * jump_.c1 + i22 * jump_.d1;
        k22 = i21 * jump_.c2 + i22 * jump_.d2;
    }
    Eigen::MatrixXcd m(2 * n_, 2 * n_);
    m.topLeftCorner(n_, n_) = k11 * at;
    m.topRightCorner(n_, n_) = k12 * ap;
    m.bottomLeftCorner(n_, n_) = k21 * at;
    m.bottomRightCorner(n_, n_) = k22 * ap;
    return m;
}

CoupledSystem assemble_coupled(const Discretization& disc, const NeumannData& data, bool precondition) {
    return CoupledSystem(disc, data, precondition);
}

void ModeSystem::apply(std::span<const cplx> in, std::span<cplx> out) const {
    if (op == nullptr) throw ArgumentError("mode system has no operator");
    if (in.size() != rhs.size() || out.size() != rhs.size()) throw ArgumentError("vector has the wrong length");
    matvec(*op, in.data(), out.data());
}

namespace {

std::vector<cplx> transformed_rhs(const Discretization& disc, const NeumannData& data, bool thermal) {
    const Mat2& f = disc.transform().forward;
    const cplx a = thermal ? f.a : f.c, b = thermal ? f.b : f.d;
    std::vector<cplx> rhs(data.g_t.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = a * data.g_t[i] + b * data.g_p[i];
    return rhs;
}

solver::SolveReport run_gmres(const ModeSystem& sys, const SolveOptions& opts) {
    return solver::gmres([&](std::span<const cplx> in, std::span<cplx> out) { sys.apply(in, out); }, sys.rhs,
                         opts.tol, opts.max_iter);
}

}  // namespace

DecoupledSystem assemble_decoupled(const Discretization& disc, const NeumannData& data) {
    validate(data, disc.size());
    DecoupledSystem sys;
    sys.thermal.op = &disc.normal_operator(Mode::Thermal);
    sys.thermal.rhs = transformed_rhs(disc, data, true);
    sys.acoustic.op = &disc.normal_operator(Mode::Acoustic);
    sys.acoustic.rhs = transformed_rhs(disc, data, false);
    return sys;
}

Solution solve(const Discretization& disc, const NeumannData& data, Method method, const SolveOptions& opts) {
    validate(data, disc.size());
    const int n = disc.size();
    Solution sol;
    sol.method = method;
    const auto start = std::chrono::steady_clock::now();
    switch (method) {
        case Method::Coupled:
        case Method::CoupledPreconditioned: {
            const CoupledSystem sys(disc, data, method == Method::CoupledPreconditioned);
            sol.report = solver::gmres([&](std::span<const cplx> in, std::span<cplx> out) { sys.apply(in, out); },
                                       sys.rhs(), opts.tol, opts.max_iter);
            sol.sigma_t.assign(sol.report.solution.begin(), sol.report.solution.begin() + n);
            sol.sigma_p.assign(sol.report.solution.begin() + n, sol.report.solution.end());
            sol.iterations = sol.report.iterations;
            sol.converged = sol.report.converged;
            break;
        }
        case Method::Decoupled: {
            const DecoupledSystem sys = assemble_decoupled(disc, data);
            sol.thermal = run_gmres(sys.thermal, opts);
            sol.report = run_gmres(sys.acoustic, opts);
            sol.sigma_t = sol.thermal->solution;
            sol.sigma_p = sol.report.solution;
            sol.iterations = sol.thermal->iterations + sol.report.iterations;
            sol.converged = sol.thermal->converged && sol.report.converged;
            break;
        }
        case Method::Projection: {
            ModeSystem sys;
            sys.op = &disc.normal_operator(Mode::Acoustic);
            sys.rhs = transformed_rhs(disc, data, false);
            sol.report = run_gmres(sys, opts);
            sol.sigma_t.assign(n, cplx(0.0));
            sol.sigma_p = sol.report.solution;
            sol.iterations = sol.report.iterations;
            sol.converged = sol.report.converged;
            break;
        }
    }
    sol.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return sol;
}

Solution solve_projection(const Discretization& disc, const NeumannData& data, const SolveOptions& opts) {
    return solve(disc, data, Method::Projection, opts);
}

void combine(const Discretization& disc, Method method, std::span<const cplx> w_t, std::span<const cplx> w_p,
             FieldValues& out) {
    if (w_t.size() != w_p.size()) throw ArgumentError("layer values differ in length");
    const std::size_t n = w_t.size();
    out.t.resize(n);
    out.p.resize(n);
    const auto& m = disc.modes();
    const Mat2& inv = disc.transform().inverse;
    for (std::size_t i = 0; i < n; ++i) {
        if (method == Method::Coupled || method == Method::CoupledPreconditioned) {
            out.t[i] = w_t[i] + w_p[i];
            out.p[i] = m.m_t * w_t[i] + m.m_p * w_p[i];
        } else {
            const cplx vt = method == Method::Projection ? cplx(0.0) : w_t[i];
            const auto tp = apply(inv, vt, w_p[i]);
            out.t[i] = tp[0];
            out.p[i] = tp[1];
        }
    }
}

FieldValues boundary_fields(const Discretization& disc, const Solution& sol) {
    const int n = disc.size();
    if (static_cast<int>(sol.sigma_t.size()) != n || static_cast<int>(sol.sigma_p.size()) != n)
        throw ArgumentError("solution densities do not match the discretization");
    std::vector<cplx> wt(n, cplx(0.0)), wp(n);
    if (sol.method != Method::Projection) matvec(disc.single_layer(Mode::Thermal), sol.sigma_t.data(), wt.data());
    matvec(disc.single_layer(Mode::Acoustic), sol.sigma_p.data(), wp.data());
    FieldValues out;
    combine(disc, sol.method, wt, wp, out);
    return out;
}

FieldValues reconstruct_fields(const Discretization& disc, const Solution& sol, std::span<const Point2> targets) {
    const int n = disc.size();
    if (static_cast<int>(sol.sigma_t.size()) != n || static_cast<int>(sol.sigma_p.size()) != n)
        throw ArgumentError("solution densities do not match the discretization");
    std::vector<cplx> wt(targets.size(), cplx(0.0));
    if (sol.method != Method::Projection)
        wt = quadrature::eval_offsurface(disc.modes().k_t, disc.curve(), sol.sigma_t, targets, disc.qbx());
    const auto wp = quadrature::eval_offsurface(disc.modes().k_p, disc.curve(), sol.sigma_p, targets, disc.qbx());
    FieldValues out;
    combine(disc, sol.method, wt, wp, out);
    return out;
}

}  // namespace mibie::formulations
