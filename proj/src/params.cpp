#include "mibie/params.hpp"

#include <cmath>
#include <string>

namespace mibie {

namespace {

constexpr double kDegenerateRel = 1e-14;

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Both roots of a s^2 + b s + c = 0 without cancellation.
std::array<cplx, 2> stable_roots(cplx a, cplx b, cplx c, cplx sq) {
    const cplx plus = -b + sq, minus = -b - sq;
    const cplx big = std::abs(minus) >= std::abs(plus) ? minus : plus;
    const cplx r1 = big / (2.0 * a);
    const cplx r2 = (2.0 * c) / big;
    return {r1, r2};
}

cplx upper_sqrt(cplx s) {
    cplx k = std::sqrt(s);
    if (k.imag() < 0.0) k = -k;
    return k;
}

}  // namespace

GasParams reference_params() { return {3.664152973215096e-5, 1.399999976158142, 5.370572762330994e-5}; }

void validate(const GasParams& p) {
    if (!std::isfinite(p.omega) || !std::isfinite(p.gamma) || !std::isfinite(p.lambda))
        throw ArgumentError("gas parameters must be finite");
    if (p.omega <= 0.0 || p.lambda <= 0.0) throw ArgumentError("omega and lambda must be positive");
    if (!(p.gamma > 1.0)) throw ArgumentError("gamma must exceed 1");
}

cplx pressure_scale(const GasParams& p) { return cplx(1.0, -p.gamma * p.lambda); }

std::array<cplx, 3> decoupling_quadratic(const GasParams& p) {
    const cplx c = pressure_scale(p);
    const double beta = p.gamma * (1.0 - p.lambda / p.omega);
    const double eta = beta + p.lambda / p.omega;
    const double delta = (p.gamma - 1.0) / p.gamma;
    return {c * beta, p.omega * eta - kI * c, -kI * p.omega * delta};
}

std::array<cplx, 2> decoupling_roots_explicit(const GasParams& p, cplx q) {
    const double om = p.omega, ga = p.gamma, la = p.lambda;
    const cplx num = (2.0 * la * ga - la - om * ga + kI) * om;
    const cplx den = 2.0 * ga * (la - om) * (kI * la * ga - 1.0);
    return {(num - kI * om * q) / den, (num + kI * om * q) / den};
}

cplx source_factor(const GasParams& p, cplx t) { return 1.0 - kI * p.gamma * p.lambda / p.omega * t; }

ModeConstants derive_modes(const GasParams& p) {
    validate(p);
    const double om = p.omega, ga = p.gamma, la = p.lambda;
    // (i om + ga om la) s^2 + (1 - i ga om - i la) s - 1 = 0, s = k^2
    const cplx a(ga * om * la, om);
    const cplx b(1.0, -ga * om - la);
    const cplx q2 = 4.0 * a + b * b;
    ModeConstants m;
    m.q = std::sqrt(q2);
    if (std::abs(m.q) <= kDegenerateRel * std::max(std::abs(b), 2.0 * std::sqrt(std::abs(a))))
        throw DegenerateError("discriminant vanishes: k_t^2 = k_p^2");
    const auto roots = stable_roots(a, b, cplx(-1.0, 0.0), m.q);
    if (std::abs(roots[0] - roots[1]) <= kDegenerateRel * std::max(std::abs(roots[0]), std::abs(roots[1])))
        throw DegenerateError("coalescing mode wavenumbers");
    cplx s0 = roots[0], s1 = roots[1];
    cplx k0 = upper_sqrt(s0), k1 = upper_sqrt(s1);
    if (std::abs(k0.imag()) < std::abs(k1.imag())) {
        std::swap(s0, s1);
        std::swap(k0, k1);
    }
    m.k_t2 = s0;
    m.k_p2 = s1;
    m.k_t = k0;
    m.k_p = k1;
    const double g = ga / (ga - 1.0);
    m.m_t = g * (1.0 + kI * om * m.k_t2);
    m.m_p = g * (1.0 + kI * om * m.k_p2);
    const auto t = decoupling_roots(p, m);
    m.t_plus = t[0];
    m.t_minus = t[1];
    // Record whether the explicit formula's t_+ is the root paired with k_t.
    const auto te = decoupling_roots_explicit(p, m.q);
    m.pairing_swapped = std::abs(te[0] - m.t_plus) > std::abs(te[0] - m.t_minus);
    if (!finite(m.k_t) || !finite(m.k_p) || !finite(m.m_t) || !finite(m.m_p))
        throw DegenerateError("non-finite mode constants");
    return m;
}

std::array<cplx, 2> decoupling_roots(const GasParams& p, const ModeConstants& m) {
    validate(p);
    if (std::abs(1.0 - p.lambda / p.omega) <= kDegenerateRel)
        throw DegenerateError("Lambda = Omega makes the decoupling quadratic degenerate");
    const auto [qa, qb, qc] = decoupling_quadratic(p);
    const cplx disc = std::sqrt(qb * qb - 4.0 * qa * qc);
    auto r = stable_roots(qa, qb, qc, disc);
    // t_+ annihilates the acoustic mode: Omega + t c m_p = 0, leaving V thermal.
    const cplx c = pressure_scale(p);
    auto acoustic_residual = [&](cplx t) { return std::abs(p.omega + t * c * m.m_p) / (p.omega + std::abs(t * c * m.m_p)); };
    if (acoustic_residual(r[1]) < acoustic_residual(r[0])) std::swap(r[0], r[1]);
    return {r[0], r[1]};
}

Mat2 operator*(const Mat2& l, const Mat2& r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
}

double cond2(const Mat2& m) {
    const double fro2 = std::norm(m.a) + std::norm(m.b) + std::norm(m.c) + std::norm(m.d);
    const double det = std::abs(m.a * m.d - m.b * m.c);
    const double disc = std::sqrt(std::max(0.0, fro2 * fro2 - 4.0 * det * det));
    const double smax = std::sqrt(0.5 * (fro2 + disc));
    if (det == 0.0) return INFINITY;
    const double smin = det / smax;
    return smax / smin;
}

DecouplingTransform build_transform(const ModeConstants& m, const GasParams& p) {
    if (m.t_plus == m.t_minus) throw DegenerateError("t_plus equals t_minus");
    const cplx c = pressure_scale(p);
    DecouplingTransform tr;
    tr.forward = {p.omega, m.t_plus * c, p.omega, m.t_minus * c};
    const cplx det = tr.forward.a * tr.forward.d - tr.forward.b * tr.forward.c;
    const double scale = std::norm(tr.forward.a) + std::norm(tr.forward.b) + std::norm(tr.forward.c) +
                         std::norm(tr.forward.d);
    if (std::abs(det) <= kDegenerateRel * scale) throw DegenerateError("singular decoupling transform");
    tr.inverse = {tr.forward.d / det, -tr.forward.b / det, -tr.forward.c / det, tr.forward.a / det};
    tr.cond2 = cond2(tr.forward);
    return tr;
}

}  // namespace mibie
