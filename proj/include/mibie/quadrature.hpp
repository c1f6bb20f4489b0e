#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "mibie/geometry.hpp"
#include "mibie/types.hpp"

namespace mibie::quadrature {

using DenseMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct QbxConfig {
    int order = 8;             // expansion truncation p
    int upsample = 4;          // oversampling factor of coefficient integrals
    double radius_factor = 0.5;
    double kr_cap = 0.5;       // also keep |k| r below this
    bool adaptive = true;      // bisect near panels until leaves are resolved
    double split_ratio = 1.0;  // leaf length / distance to centre
    int leaf_nodes = 0;        // Gauss nodes per leaf, 0 means upsample * q
};

void validate(const QbxConfig& cfg);

// Layer kind: single layer S, its target normal derivative, double layer D.
enum class Kind { S, dSdn, D };
enum class Side { Exterior, Interior };

const char* kind_name(Kind kind);

struct BoundaryOperator {
    DenseMatrix matrix;
    cplx wavenumber;
    Kind kind = Kind::S;
    Side side = Side::Exterior;

    int size() const { return static_cast<int>(matrix.rows()); }
    std::vector<cplx> apply(std::span<const cplx> density) const;
};

double expansion_radius(cplx k, double h, const QbxConfig& cfg);

// One-sided limits at the nodes of the Helmholtz layer potential with kernel
// (i/4) H_0(k|x - y|). For dSdn and D the jump term is part of the matrix.
BoundaryOperator qbx_onesided_matrix(cplx k, const geometry::PanelizedCurve& curve, const QbxConfig& cfg, Kind kind,
                                     Side side = Side::Exterior);

BoundaryOperator qbx_double_layer_matrix(cplx k, const geometry::PanelizedCurve& curve, const QbxConfig& cfg,
                                         Side side = Side::Exterior);

// Same limits as qbx_onesided_matrix applied to one density without storing the matrix.
std::vector<cplx> apply_onsurface(cplx k, const geometry::PanelizedCurve& curve, std::span<const cplx> density,
                                  const QbxConfig& cfg, Kind kind, Side side = Side::Exterior);

// Layer potential (kind S or D) at points off the curve on the given side.
std::vector<cplx> eval_offsurface(cplx k, const geometry::PanelizedCurve& curve, std::span<const cplx> density,
                                  std::span<const Point2> targets, const QbxConfig& cfg, Kind kind = Kind::S,
                                  Side side = Side::Exterior);

}  // namespace mibie::quadrature
