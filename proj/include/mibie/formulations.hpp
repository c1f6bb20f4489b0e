#pragma once

#include <Eigen/Dense>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mibie/geometry.hpp"
#include "mibie/kernels.hpp"
#include "mibie/params.hpp"
#include "mibie/quadrature.hpp"
#include "mibie/solver.hpp"
#include "mibie/types.hpp"

namespace mibie::formulations {

enum class Method { Coupled, CoupledPreconditioned, Decoupled, Projection };

// Accepts coupled, coupled-precond, decoupled, projection.
Method parse_method(std::string_view name);
const char* method_name(Method method);

enum class Mode { Thermal, Acoustic };

struct NeumannData {
    std::vector<cplx> g_t;  // dT/dn at the nodes
    std::vector<cplx> g_p;  // dP/dn at the nodes
};

void validate(const NeumannData& data, int n);

// Curve, parameters and QBX settings shared by every method, with the
// Helmholtz boundary operators of both modes assembled on first use.
class Discretization {
public:
    Discretization(geometry::PanelizedCurve curve, const GasParams& params, const quadrature::QbxConfig& cfg);

    const geometry::PanelizedCurve& curve() const { return curve_; }
    const GasParams& params() const { return params_; }
    const ModeConstants& modes() const { return modes_; }
    const DecouplingTransform& transform() const { return transform_; }
    const quadrature::QbxConfig& qbx() const { return cfg_; }
    int size() const { return curve_.size(); }
    cplx wavenumber(Mode mode) const { return mode == Mode::Thermal ? modes_.k_t : modes_.k_p; }

    // Exterior one-sided dS/dn, jump included.
    const quadrature::BoundaryOperator& normal_operator(Mode mode) const;
    // On-surface single layer.
    const quadrature::BoundaryOperator& single_layer(Mode mode) const;

private:
    struct Cached {
        std::once_flag once;
        std::optional<quadrature::BoundaryOperator> op;
    };
    const quadrature::BoundaryOperator& cached(Cached& slot, Mode mode, quadrature::Kind kind) const;

    geometry::PanelizedCurve curve_;
    GasParams params_;
    ModeConstants modes_;
    DecouplingTransform transform_;
    quadrature::QbxConfig cfg_;
    std::unique_ptr<Cached[]> cache_;  // dSdn thermal, dSdn acoustic, S thermal, S acoustic
};

// [[A_t, A_p], [m_t A_t, m_p A_p]] with A_k the exterior dS/dn of wavenumber k,
// i.e. -1/2 C + K with C the jump matrix. Optionally left-preconditioned by
// the inverse of -1/2 C.
class CoupledSystem {
public:
    CoupledSystem(const Discretization& disc, const NeumannData& data, bool precondition);

    int size() const { return 2 * n_; }
    bool preconditioned() const { return precondition_; }
    const kernels::JumpCoefficients& jump() const { return jump_; }
    const std::vector<cplx>& rhs() const { return rhs_; }

    void apply(std::span<const cplx> in, std::span<cplx> out) const;
    // In place v <- (-1/2 C)^{-1} v on a block vector.
    void block_solve(std::span<cplx> v) const;
    // Explicit matrix of apply().
    Eigen::MatrixXcd dense() const;

private:
    const Discretization& disc_;
    int n_;
    bool precondition_;
    kernels::JumpCoefficients jump_;
    std::vector<cplx> rhs_;
};

CoupledSystem assemble_coupled(const Discretization& disc, const NeumannData& data, bool precondition);

// One Helmholtz second-kind system A_k sigma = rhs.
struct ModeSystem {
    const quadrature::BoundaryOperator* op = nullptr;
    std::vector<cplx> rhs;
    void apply(std::span<const cplx> in, std::span<cplx> out) const;
};

struct DecoupledSystem {
    ModeSystem thermal;   // rhs = Omega g_T + t_plus (1 - i gamma Lambda) g_P
    ModeSystem acoustic;  // rhs = Omega g_T + t_minus (1 - i gamma Lambda) g_P
};

DecoupledSystem assemble_decoupled(const Discretization& disc, const NeumannData& data);

struct SolveOptions {
    double tol = 1e-14;
    int max_iter = 500;
};

// Densities on the thermal (k_t) and acoustic (k_p) Helmholtz single layers.
// Coupled: sigma_1, sigma_2. Decoupled: densities of V_t, V_p. Projection:
// sigma_t is zero.
struct Solution {
    Method method = Method::Coupled;
    std::vector<cplx> sigma_t, sigma_p;
    solver::SolveReport report;                  // coupled system, or the acoustic solve
    std::optional<solver::SolveReport> thermal;  // decoupled only
    int iterations = 0;                          // sum over the GMRES solves
    bool converged = false;
    double wall_time = 0.0;
};

Solution solve(const Discretization& disc, const NeumannData& data, Method method, const SolveOptions& opts = {});
Solution solve_projection(const Discretization& disc, const NeumannData& data, const SolveOptions& opts = {});

struct FieldValues {
    std::vector<cplx> t, p;
};

// (T, P) from the two single-layer values of a solution.
void combine(const Discretization& disc, Method method, std::span<const cplx> w_t, std::span<const cplx> w_p,
             FieldValues& out);

// T and P at the curve nodes.
FieldValues boundary_fields(const Discretization& disc, const Solution& sol);

// T and P at exterior points.
FieldValues reconstruct_fields(const Discretization& disc, const Solution& sol, std::span<const Point2> targets);

}  // namespace mibie::formulations
