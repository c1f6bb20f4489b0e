#include "mibie/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mibie/specfun.hpp"

namespace mibie::quadrature {

namespace {

using geometry::PanelizedCurve;

constexpr double kNearFactor = 2.0;    // panels closer than this many lengths use QBX
constexpr double kDecayCutoff = 40.0;  // Im(k) * distance beyond which the kernel is dropped
constexpr double kThinFactor = 0.8;
constexpr double kVolumeQbxFactor = 3.0;
constexpr int kMaxLeafDepth = 40;
constexpr double kLeafPhase = 4.0;     // |k| * leaf length bound

struct Target {
    Point2 x{};
    Point2 nx{};
    bool has_center = false;
    Point2 c{};
    double rc = 0.0;
    int own_panel = -1;
    bool on_surface = false;
};

struct PanelBox {
    Point2 mid{};
    double radius = 0.0;
};

cplx as_complex(Point2 p) { return {p.x, p.y}; }

class Evaluator {
public:
    Evaluator(cplx k, const PanelizedCurve& curve, const QbxConfig& cfg, Kind kind, Side side)
        : k_(k), curve_(curve), cfg_(cfg), kind_(kind), sign_(side == Side::Exterior ? 1.0 : -1.0),
          q_(curve.nodes_per_panel()), n_up_(cfg.upsample * q_),
          n_leaf_(cfg.leaf_nodes > 0 ? cfg.leaf_nodes : cfg.upsample * q_), gl_q_(geometry::gauss_legendre(q_)),
          gl_up_(geometry::gauss_legendre(n_up_)), gl_leaf_(geometry::gauss_legendre(n_leaf_)),
          P_(cfg.order + 1) {
        if (!std::isfinite(k.real()) || !std::isfinite(k.imag()) || k == cplx(0.0))
            throw DomainError("wavenumber must be finite and nonzero");
        const double rho_c = std::pow(10.0, 16.0 / (2.0 * q_));
        coarse_a_ = 0.5 * (rho_c + 1.0 / rho_c);
        zone_ratio_ = std::pow(10.0, 16.0 / (cfg.order + 1.0));
        lup_.resize(static_cast<std::size_t>(n_up_) * q_);
        for (int u = 0; u < n_up_; ++u) geometry::lagrange_weights(gl_q_, gl_up_.x[u], &lup_[u * q_]);
        const int np = curve.n_panels();
        box_.resize(np);
        up_x_.resize(static_cast<std::size_t>(np) * n_up_);
        up_n_.resize(up_x_.size());
        up_w_.resize(up_x_.size());
        for (int p = 0; p < np; ++p) {
            const auto& pn = curve.panels()[p];
            const double half = 0.5 * (pn.t1 - pn.t0);
            box_[p].mid = geometry::sample(curve.shape(), pn.t0 + half).x;
            double rad = std::max(norm(geometry::sample(curve.shape(), pn.t0).x - box_[p].mid),
                                  norm(geometry::sample(curve.shape(), pn.t1).x - box_[p].mid));
            for (int u = 0; u < n_up_; ++u) {
                const auto s = geometry::sample(curve.shape(), pn.t0 + half * (gl_up_.x[u] + 1.0));
                const std::size_t idx = static_cast<std::size_t>(p) * n_up_ + u;
                up_x_[idx] = s.x;
                up_n_[idx] = geometry::outward_normal(s);
                up_w_[idx] = gl_up_.w[u] * half * norm(s.dx);
                rad = std::max(rad, norm(s.x - box_[p].mid));
            }
            box_[p].radius = rad;
        }
    }

    Target surface_target(int i) const {
        Target t;
        t.x = curve_.positions()[i];
        t.nx = curve_.normals()[i];
        t.own_panel = curve_.panel_of(i);
        t.has_center = true;
        t.on_surface = true;
        t.rc = expansion_radius(k_, curve_.panels()[t.own_panel].length, cfg_);
        t.c = t.x + (sign_ * t.rc) * t.nx;
        return t;
    }

    Target volume_target(Point2 x) const {
        const auto cp = curve_.closest_point(x);
        if (sign_ * cp.signed_distance <= 0.0)
            throw DomainError(sign_ > 0.0 ? "target lies inside D or on the curve"
                                          : "target lies outside D or on the curve");
        Target t;
        t.x = x;
        t.nx = cp.normal;
        const double d = std::abs(cp.signed_distance);
        const double h = curve_.panels()[cp.panel].length;
        if (d < kVolumeQbxFactor * h) {
            t.has_center = true;
            t.own_panel = cp.panel;
            t.rc = expansion_radius(k_, h, cfg_);
            t.c = cp.foot + (sign_ * (d + t.rc)) * cp.normal;
        }
        return t;
    }

    // Coefficients of the nodal density for the value at target t; out has curve size.
    void row(const Target& t, cplx* out) const {
        const int n = curve_.size();
        std::fill(out, out + n, cplx(0.0));
        std::vector<cplx> e;
        if (t.has_center) e = target_coefficients(t);
        const int np = curve_.n_panels();
        const double kim = std::max(k_.imag(), 0.0);
        for (int p = 0; p < np; ++p) {
            const double hp = curve_.panels()[p].length;
            const double dx = std::max(0.0, norm(box_[p].mid - t.x) - box_[p].radius);
            if (kim * dx > kDecayCutoff) continue;
            cplx* dst = out + static_cast<std::size_t>(p) * q_;
            if (t.has_center) {
                const double dc = std::max(0.0, norm(box_[p].mid - t.c) - box_[p].radius);
                const int gap = cyclic_gap(p, t.own_panel);
                if (gap <= 1 || std::min(dc, dx) < kNearFactor * hp) {
                    if (t.on_surface && gap > 1) thin_check(p, t);
                    qbx_panel(p, t, e, dst);
                    continue;
                }
                // A partial-curve potential is singular at the zone ends, so the
                // expansion zone must extend far enough for that to be invisible.
                if (dc < t.rc * zone_ratio_) {
                    const bool coarse = 2.0 * dc >= coarse_a_ * hp && std::abs(k_) * hp <= 2.0;
                    qbx_nodes(p, t, e, dst, coarse);
                    continue;
                }
            }
            if (2.0 * dx >= coarse_a_ * hp && std::abs(k_) * hp <= 2.0) {
                const int j0 = p * q_;
                for (int j = 0; j < q_; ++j)
                    dst[j] += direct(t, curve_.positions()[j0 + j], curve_.normals()[j0 + j]) *
                              curve_.weights()[j0 + j];
            } else {
                for (int u = 0; u < n_up_; ++u) {
                    const std::size_t idx = static_cast<std::size_t>(p) * n_up_ + u;
                    const cplx v = direct(t, up_x_[idx], up_n_[idx]) * up_w_[idx];
                    if (v == cplx(0.0)) continue;
                    const double* l = &lup_[u * q_];
                    for (int j = 0; j < q_; ++j) dst[j] += v * l[j];
                }
            }
        }
    }

private:
    int cyclic_gap(int p, int own) const {
        if (own < 0) return curve_.n_panels();
        const int np = curve_.n_panels();
        const int d = std::abs(p - own);
        return std::min(d, np - d);
    }

    void thin_check(int p, const Target& t) const {
        for (int u = 0; u < n_up_; ++u) {
            if (norm(up_x_[static_cast<std::size_t>(p) * n_up_ + u] - t.c) < kThinFactor * t.rc)
                throw GeometryError("geometry too thin for the QBX expansion radius; refine the panels");
        }
    }

    cplx direct(const Target& t, Point2 y, Point2 ny) const {
        const Point2 d = t.x - y;
        const double r = norm(d);
        if (k_.imag() * r > kDecayCutoff) return 0.0;
        const auto h = specfun::raw::hankel01(k_ * r);
        switch (kind_) {
            case Kind::S:
                return 0.25 * kI * h[0];
            case Kind::dSdn:
                return -0.25 * kI * k_ * h[1] * (dot(d, t.nx) / r);
            case Kind::D:
                return 0.25 * kI * k_ * h[1] * (dot(d, ny) / r);
        }
        return 0.0;
    }

    // E_l, l = -p..p, such that the value at x is sum_l E_l a_l(y).
    std::vector<cplx> target_coefficients(const Target& t) const {
        const int p = cfg_.order, P = P_;
        std::vector<cplx> jt(P + 1), psi(2 * P + 1), e(2 * p + 1);
        const Point2 d = t.x - t.c;
        const double rho = norm(d);
        const cplx zeta = as_complex(d) / rho;
        specfun::raw::bessel_j_table(P, k_ * rho, jt.data());
        psi[P] = jt[0];
        cplx zp = 1.0;
        for (int m = 1; m <= P; ++m) {
            zp *= zeta;
            psi[P + m] = jt[m] * zp;
            psi[P - m] = ((m % 2) ? -1.0 : 1.0) * jt[m] * std::conj(zp);
        }
        const cplx quarter_i = 0.25 * kI;
        if (kind_ == Kind::dSdn) {
            const cplx nu = as_complex(t.nx);
            for (int l = -p; l <= p; ++l)
                e[l + p] = quarter_i * (0.5 * k_) * (nu * psi[P + l - 1] - std::conj(nu) * psi[P + l + 1]);
        } else {
            for (int l = -p; l <= p; ++l) e[l + p] = quarter_i * psi[P + l];
        }
        return e;
    }

    // Expansion kernel sum_l E_l a_l(y) for a source at y with normal ny.
    cplx expansion_kernel(const Target& t, const std::vector<cplx>& e, Point2 y, Point2 ny, cplx* ht,
                          cplx* phi) const {
        const int p = cfg_.order, P = P_;
        const Point2 d = y - t.c;
        const double rho = norm(d);
        const cplx zeta = as_complex(d) / rho;
        specfun::raw::hankel_table(P, k_ * rho, ht);
        phi[P] = ht[0];
        cplx zp = 1.0;
        for (int m = 1; m <= P; ++m) {
            zp *= zeta;
            phi[P + m] = ht[m] * zp;
            phi[P - m] = ((m % 2) ? -1.0 : 1.0) * ht[m] * std::conj(zp);
        }
        cplx g = 0.0;
        if (kind_ == Kind::D) {
            const cplx nu = as_complex(ny);
            const cplx hk = 0.5 * k_;
            for (int l = -p; l <= p; ++l) {
                const cplx a = hk * (nu * phi[P - l - 1] - std::conj(nu) * phi[P - l + 1]);
                g += (l % 2 ? -1.0 : 1.0) * e[l + p] * a;
            }
        } else {
            for (int l = -p; l <= p; ++l) g += (l % 2 ? -1.0 : 1.0) * e[l + p] * phi[P - l];
        }
        return g;
    }

    double leaf_distance(double ta, double tb, Point2 c) const {
        double d = INFINITY;
        for (int s = 0; s <= 4; ++s) d = std::min(d, norm(geometry::sample(curve_.shape(), ta + (tb - ta) * s / 4.0).x - c));
        return d;
    }

    void collect_leaves(double ta, double tb, Point2 c, int depth, std::vector<std::pair<double, double>>& leaves) const {
        const double tm = 0.5 * (ta + tb);
        const double len = norm(geometry::sample(curve_.shape(), tm).dx) * (tb - ta);
        if (depth >= kMaxLeafDepth ||
            (len <= cfg_.split_ratio * leaf_distance(ta, tb, c) && std::abs(k_) * len <= kLeafPhase)) {
            leaves.emplace_back(ta, tb);
            return;
        }
        collect_leaves(ta, tm, c, depth + 1, leaves);
        collect_leaves(tm, tb, c, depth + 1, leaves);
    }

    // Expansion coefficients from the stored coarse or upsampled nodes of a panel.
    void qbx_nodes(int p, const Target& t, const std::vector<cplx>& e, cplx* dst, bool coarse) const {
        std::vector<cplx> ht(P_ + 1), phi(2 * P_ + 1);
        const double kim = std::max(k_.imag(), 0.0);
        if (coarse) {
            const int j0 = p * q_;
            for (int j = 0; j < q_; ++j) {
                const Point2 y = curve_.positions()[j0 + j];
                if (kim * (norm(y - t.c) - t.rc) > kDecayCutoff) continue;
                dst[j] += expansion_kernel(t, e, y, curve_.normals()[j0 + j], ht.data(), phi.data()) *
                          curve_.weights()[j0 + j];
            }
            return;
        }
        for (int u = 0; u < n_up_; ++u) {
            const std::size_t idx = static_cast<std::size_t>(p) * n_up_ + u;
            if (kim * (norm(up_x_[idx] - t.c) - t.rc) > kDecayCutoff) continue;
            const cplx v = expansion_kernel(t, e, up_x_[idx], up_n_[idx], ht.data(), phi.data()) * up_w_[idx];
            const double* l = &lup_[u * q_];
            for (int j = 0; j < q_; ++j) dst[j] += v * l[j];
        }
    }

    void qbx_panel(int p, const Target& t, const std::vector<cplx>& e, cplx* dst) const {
        if (!cfg_.adaptive) {
            qbx_nodes(p, t, e, dst, false);
            return;
        }
        std::vector<cplx> ht(P_ + 1), phi(2 * P_ + 1);
        const double kim = std::max(k_.imag(), 0.0);
        const auto& pn = curve_.panels()[p];
        std::vector<std::pair<double, double>> leaves;
        collect_leaves(pn.t0, pn.t1, t.c, 0, leaves);
        std::vector<double> lw(q_);
        const double scale = 2.0 / (pn.t1 - pn.t0);
        for (const auto& [ta, tb] : leaves) {
            if (kim * (leaf_distance(ta, tb, t.c) - t.rc) > kDecayCutoff) continue;
            const double half = 0.5 * (tb - ta);
            for (int u = 0; u < n_leaf_; ++u) {
                const double tt = ta + half * (gl_leaf_.x[u] + 1.0);
                const auto s = geometry::sample(curve_.shape(), tt);
                const double w = gl_leaf_.w[u] * half * norm(s.dx);
                const cplx v = expansion_kernel(t, e, s.x, geometry::outward_normal(s), ht.data(), phi.data()) * w;
                geometry::lagrange_weights(gl_q_, scale * (tt - pn.t0) - 1.0, lw.data());
                for (int j = 0; j < q_; ++j) dst[j] += v * lw[j];
            }
        }
    }

    cplx k_;
    const PanelizedCurve& curve_;
    QbxConfig cfg_;
    Kind kind_;
    double sign_;
    int q_, n_up_, n_leaf_;
    const geometry::GaussLegendre& gl_q_;
    const geometry::GaussLegendre& gl_up_;
    const geometry::GaussLegendre& gl_leaf_;
    int P_;
    double coarse_a_ = 0.0;
    double zone_ratio_ = 0.0;
    std::vector<double> lup_;
    std::vector<PanelBox> box_;
    std::vector<Point2> up_x_, up_n_;
    std::vector<double> up_w_;
};

void check_density(const PanelizedCurve& curve, std::span<const cplx> density) {
    if (static_cast<int>(density.size()) != curve.size())
        throw ArgumentError("density length " + std::to_string(density.size()) + " does not match node count " +
                            std::to_string(curve.size()));
}

}  // namespace

void validate(const QbxConfig& cfg) {
    if (cfg.order < 0 || cfg.order > specfun::kMaxOrder - 1) throw ArgumentError("QBX order must lie in [0, 59]");
    if (cfg.upsample < 1) throw ArgumentError("upsample must be at least 1");
    if (!(cfg.radius_factor > 0.0) || cfg.radius_factor > 1.0) throw ArgumentError("radius_factor must lie in (0, 1]");
    if (!(cfg.kr_cap > 0.0)) throw ArgumentError("kr_cap must be positive");
    if (!(cfg.split_ratio > 0.0)) throw ArgumentError("split_ratio must be positive");
    if (cfg.leaf_nodes < 0) throw ArgumentError("leaf_nodes must be non-negative");
}

const char* kind_name(Kind kind) {
    switch (kind) {
        case Kind::S:
            return "S";
        case Kind::dSdn:
            return "dSdn";
        case Kind::D:
            return "D";
    }
    return "?";
}

double expansion_radius(cplx k, double h, const QbxConfig& cfg) {
    return std::min(cfg.radius_factor * h, cfg.kr_cap / std::abs(k));
}

std::vector<cplx> BoundaryOperator::apply(std::span<const cplx> density) const {
    if (static_cast<Eigen::Index>(density.size()) != matrix.cols())
        throw ArgumentError("density length does not match operator size");
    std::vector<cplx> out(matrix.rows());
    Eigen::Map<Eigen::VectorXcd>(out.data(), out.size()) =
        matrix * Eigen::Map<const Eigen::VectorXcd>(density.data(), density.size());
    return out;
}

BoundaryOperator qbx_onesided_matrix(cplx k, const PanelizedCurve& curve, const QbxConfig& cfg, Kind kind, Side side) {
    validate(cfg);
    const Evaluator ev(k, curve, cfg, kind, side);
    BoundaryOperator op;
    op.wavenumber = k;
    op.kind = kind;
    op.side = side;
    const int n = curve.size();
    op.matrix.resize(n, n);
    for (int i = 0; i < n; ++i) ev.row(ev.surface_target(i), op.matrix.row(i).data());
    return op;
}

BoundaryOperator qbx_double_layer_matrix(cplx k, const PanelizedCurve& curve, const QbxConfig& cfg, Side side) {
    return qbx_onesided_matrix(k, curve, cfg, Kind::D, side);
}

std::vector<cplx> apply_onsurface(cplx k, const PanelizedCurve& curve, std::span<const cplx> density,
                                  const QbxConfig& cfg, Kind kind, Side side) {
    validate(cfg);
    check_density(curve, density);
    const Evaluator ev(k, curve, cfg, kind, side);
    const int n = curve.size();
    std::vector<cplx> row(n), out(n);
    for (int i = 0; i < n; ++i) {
        ev.row(ev.surface_target(i), row.data());
        cplx s = 0.0;
        for (int j = 0; j < n; ++j) s += row[j] * density[j];
        out[i] = s;
    }
    return out;
}

std::vector<cplx> eval_offsurface(cplx k, const PanelizedCurve& curve, std::span<const cplx> density,
                                  std::span<const Point2> targets, const QbxConfig& cfg, Kind kind, Side side) {
    validate(cfg);
    check_density(curve, density);
    if (kind == Kind::dSdn) throw ArgumentError("off-surface evaluation supports S and D only");
    const Evaluator ev(k, curve, cfg, kind, side);
    const int n = curve.size();
    std::vector<cplx> row(n), out(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        ev.row(ev.volume_target(targets[i]), row.data());
        cplx s = 0.0;
        for (int j = 0; j < n; ++j) s += row[j] * density[j];
        out[i] = s;
    }
    return out;
}

}  // namespace mibie::quadrature
