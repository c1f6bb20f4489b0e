#include "mibie/kernels.hpp"

#include <cmath>
#include <string>

#include "mibie/specfun.hpp"

namespace mibie::kernels {

namespace {

void check_radius(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("kernel radius must be positive and finite");
}

bool negligible(cplx k, double r) { return k.imag() * r > 700.0; }

std::array<cplx, 2> hankel01_or_zero(cplx z) {
    if (z.imag() > 700.0) return {0.0, 0.0};
    return specfun::raw::hankel01(z);
}

}  // namespace

HelmholtzValue helmholtz_kernel_2d(cplx k, double r) {
    check_radius(r);
    if (!std::isfinite(k.real()) || !std::isfinite(k.imag()) || k == cplx(0.0))
        throw DomainError("wavenumber must be finite and nonzero");
    if (negligible(k, r)) return {0.0, 0.0};
    const auto h = specfun::raw::hankel01(k * r);
    return {0.25 * kI * h[0], -0.25 * kI * k * h[1]};
}

GreensCoefficients greens_coefficients(Dim dim, const ModeConstants& m, const GasParams& p) {
    // Leading-order matching at the origin:
    //   b1 + b2 = 1 / (4 i Omega),  b1 m_p + b2 m_t = -i gamma Lambda / (Omega 4 i c)
    const cplx c = pressure_scale(p);
    const cplx s1 = 1.0 / (4.0 * kI * p.omega);
    const cplx s2 = -kI * p.gamma * p.lambda / p.omega / (4.0 * kI * c);
    const cplx den = m.m_t - m.m_p;
    const cplx b1 = (s1 * m.m_t - s2) / den;
    const cplx b2 = (s2 - s1 * m.m_p) / den;
    if (dim == Dim::Two) return {b1, b2};
    // 3D: 4 pi i Omega (c1 / k_p + c2 / k_t) = 1 etc., i.e. c = (k / pi) b
    return {m.k_p / kPi * b1, m.k_t / kPi * b2};
}

cplx labelled_discriminant(const ModeConstants& m, const GasParams& p) {
    const cplx a(p.gamma * p.omega * p.lambda, p.omega);
    return -a * (m.k_t2 - m.k_p2);
}

GreensPair greens_2d(const ModeConstants& m, const GasParams& p, double r) {
    check_radius(r);
    const GreensCoefficients b = greens_coefficients(Dim::Two, m, p);
    const cplx hp = hankel01_or_zero(m.k_p * r)[0];
    const cplx ht = hankel01_or_zero(m.k_t * r)[0];
    return {b.acoustic * hp + b.thermal * ht, b.acoustic * m.m_p * hp + b.thermal * m.m_t * ht};
}

GreensPair greens_3d(const ModeConstants& m, const GasParams& p, double r) {
    check_radius(r);
    const GreensCoefficients c = greens_coefficients(Dim::Three, m, p);
    const cplx hp = specfun::spherical_h1_0(m.k_p * r);
    const cplx ht = specfun::spherical_h1_0(m.k_t * r);
    return {c.acoustic * hp + c.thermal * ht, c.acoustic * m.m_p * hp + c.thermal * m.m_t * ht};
}

GreensPair greens_gradient_2d(const ModeConstants& m, const GasParams& p, Point2 x, Point2 y, Point2 n_x) {
    return Greens2D(m, p).normal_derivative(x, y, n_x);
}

std::pair<GreensPair, GreensPair> g1_g2(Dim dim, const ModeConstants& m, double r) {
    check_radius(r);
    if (dim == Dim::Two) {
        const cplx s = -1.0 / (4.0 * kI);
        const cplx ht = s * hankel01_or_zero(m.k_t * r)[0];
        const cplx hp = s * hankel01_or_zero(m.k_p * r)[0];
        return {{ht, m.m_t * ht}, {hp, m.m_p * hp}};
    }
    const cplx ht = -m.k_t / (4.0 * kPi * kI) * specfun::spherical_h1_0(m.k_t * r);
    const cplx hp = -m.k_p / (4.0 * kPi * kI) * specfun::spherical_h1_0(m.k_p * r);
    return {{ht, m.m_t * ht}, {hp, m.m_p * hp}};
}

JumpCoefficients jump_coefficients(Dim dim, const ModeConstants& m) {
    JumpCoefficients j;
    if (dim == Dim::Two) {
        j = {1.0, 1.0, m.m_t, m.m_p};
    } else {
        j = {1.0 / m.k_t, 1.0 / m.k_p, m.m_t / m.k_t, m.m_p / m.k_p};
    }
    const double scale = std::abs(j.c1 * j.d2) + std::abs(j.c2 * j.d1);
    if (std::abs(j.determinant()) <= 1e-12 * scale) throw DegenerateError("jump matrix is singular");
    return j;
}

Greens2D::Greens2D(const ModeConstants& m, const GasParams& p) : m_(m), b_(greens_coefficients(Dim::Two, m, p)) {}

GreensPair Greens2D::value(Point2 x, Point2 y) const {
    const double r = norm(x - y);
    check_radius(r);
    const cplx hp = hankel01_or_zero(m_.k_p * r)[0];
    const cplx ht = hankel01_or_zero(m_.k_t * r)[0];
    return {b_.acoustic * hp + b_.thermal * ht, b_.acoustic * m_.m_p * hp + b_.thermal * m_.m_t * ht};
}

GreensPair Greens2D::normal_derivative(Point2 x, Point2 y, Point2 n_x) const {
    const Point2 d = x - y;
    const double r = norm(d);
    if (!(r > 0.0)) throw DomainError("coincident points in Green's gradient");
    const double dn = dot(d, n_x) / r;
    const cplx hp = -m_.k_p * hankel01_or_zero(m_.k_p * r)[1] * dn;
    const cplx ht = -m_.k_t * hankel01_or_zero(m_.k_t * r)[1] * dn;
    return {b_.acoustic * hp + b_.thermal * ht, b_.acoustic * m_.m_p * hp + b_.thermal * m_.m_t * ht};
}

}  // namespace mibie::kernels
