#include "mibie/specfun.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

namespace mibie::specfun {

namespace {

using ldcplx = std::complex<long double>;

constexpr long double kEulerGamma = 0.577215664901532860606512090082402431L;
constexpr long double kPiL = 3.141592653589793238462643383279502884L;
constexpr double kSeriesRadius = 2.0;

// J0, J1, Y0, Y1 from the ascending series, in extended precision.
struct SmallArg {
    ldcplx j0, j1, y0, y1;
};

SmallArg small_argument_series(cplx zd) {
    const ldcplx z(zd.real(), zd.imag());
    const ldcplx q = -(z * z) / 4.0L;
    const ldcplx lg = std::log(z / 2.0L);
    // term_k = q^k / (k!)^2 for order 0, q^k / (k!(k+1)!) for order 1
    ldcplx t0 = 1.0L, t1 = 1.0L;
    ldcplx s0 = 0.0L, s1 = 0.0L, u0 = 0.0L, u1 = 0.0L;
    long double psi_k = -kEulerGamma;    // psi(k+1)
    long double psi_k1 = 1.0L - kEulerGamma;  // psi(k+2)
    for (int k = 0; k < 80; ++k) {
        s0 += t0;
        s1 += t1;
        u0 += 2.0L * psi_k * t0;
        u1 += (psi_k + psi_k1) * t1;
        const long double kk = k + 1;
        t0 *= q / (kk * kk);
        t1 *= q / (kk * (kk + 1.0L));
        psi_k += 1.0L / kk;
        psi_k1 += 1.0L / (kk + 1.0L);
        if (std::abs(t0) < 1e-22L * std::abs(s0) && std::abs(t1) < 1e-22L * std::abs(s1))
            break;
    }
    SmallArg out;
    out.j0 = s0;
    out.j1 = (z / 2.0L) * s1;
    out.y0 = (2.0L / kPiL) * lg * out.j0 - u0 / kPiL;
    out.y1 = -(2.0L / (kPiL * z)) + (2.0L / kPiL) * lg * out.j1 - (z / 2.0L) * u1 / kPiL;
    return out;
}

// Generalized Gauss-Laguerre rule for weight u^{-1/2} e^{-u}.
struct LaguerreRule {
    std::vector<double> x, w;
};

LaguerreRule make_laguerre(int n, double alpha) {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        jac(i, i) = 2.0 * i + alpha + 1.0;
        if (i + 1 < n) {
            const double b = std::sqrt((i + 1.0) * (i + 1.0 + alpha));
            jac(i, i + 1) = b;
            jac(i + 1, i) = b;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
    LaguerreRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    const double log_norm = std::lgamma(n + alpha + 1.0) - std::lgamma(n + 1.0);
    for (int i = 0; i < n; ++i) {
        double x = es.eigenvalues()(i);
        double lnp1 = 0.0;
        // Newton polish on L_n^alpha, then weight from L_{n+1}^alpha.
        for (int it = 0; it < 4; ++it) {
            long double lm1 = 1.0L, l0 = 1.0L + alpha - x;
            for (int k = 1; k < n; ++k) {
                const long double lp = ((2.0L * k + 1.0L + alpha - x) * l0 - (k + alpha) * lm1) / (k + 1.0L);
                lm1 = l0;
                l0 = lp;
            }
            const long double dl = (n * l0 - (n + alpha) * lm1) / x;
            x -= static_cast<double>(l0 / dl);
        }
        long double lm1 = 1.0L, l0 = 1.0L + alpha - x;
        for (int k = 1; k <= n; ++k) {
            const long double lp = ((2.0L * k + 1.0L + alpha - x) * l0 - (k + alpha) * lm1) / (k + 1.0L);
            lm1 = l0;
            l0 = lp;
        }
        lnp1 = static_cast<double>(l0);
        rule.x[i] = x;
        rule.w[i] = std::exp(log_norm) * x / ((n + 1.0) * (n + 1.0) * lnp1 * lnp1);
    }
    return rule;
}

const LaguerreRule& laguerre_for(double az) {
    static const std::array<LaguerreRule, 6> rules = {make_laguerre(8, -0.5),  make_laguerre(12, -0.5),
                                                      make_laguerre(16, -0.5), make_laguerre(24, -0.5),
                                                      make_laguerre(32, -0.5), make_laguerre(40, -0.5)};
    if (az >= 12.0) return rules[0];
    if (az >= 8.0) return rules[1];
    if (az >= 5.0) return rules[2];
    if (az >= 3.0) return rules[3];
    if (az >= 2.5) return rules[4];
    return rules[5];
}

// H0, H1 from the ascending series in double precision; |z| < kSeriesRadius.
std::array<cplx, 2> hankel01_small(cplx z) {
    const cplx q = -0.25 * (z * z);
    const cplx lg = std::log(0.5 * z);
    cplx t0 = 1.0, t1 = 1.0, s0 = 0.0, s1 = 0.0, u0 = 0.0, u1 = 0.0;
    double psi_k = -static_cast<double>(kEulerGamma), psi_k1 = 1.0 - static_cast<double>(kEulerGamma);
    const double stop = 1e-34 * std::max(1.0, std::norm(q));
    for (int k = 0; k < 40; ++k) {
        s0 += t0;
        s1 += t1;
        u0 += (2.0 * psi_k) * t0;
        u1 += (psi_k + psi_k1) * t1;
        const double kk = k + 1.0;
        t0 *= q * (1.0 / (kk * kk));
        t1 *= q * (1.0 / (kk * (kk + 1.0)));
        psi_k += 1.0 / kk;
        psi_k1 += 1.0 / (kk + 1.0);
        if (std::norm(t0) < stop && k > 2) break;
    }
    const double two_pi = 2.0 / kPi;
    const cplx j0 = s0, j1 = 0.5 * z * s1;
    const cplx y0 = two_pi * lg * j0 - u0 * (1.0 / kPi);
    const cplx y1 = -two_pi / z + two_pi * lg * j1 - 0.5 * z * u1 * (1.0 / kPi);
    return {j0 + kI * y0, j1 + kI * y1};
}

// Hankel integral representation, Im z >= 0 and |z| >= kSeriesRadius.
std::array<cplx, 2> hankel01_integral(cplx z) {
    const LaguerreRule& rule = laguerre_for(std::abs(z));
    const cplx a = kI / (2.0 * z);
    double i0r = 0.0, i0i = 0.0, i1r = 0.0, i1i = 0.0;
    for (std::size_t k = 0; k < rule.x.size(); ++k) {
        // sqrt(1 + a x): the real part of the radicand is positive here
        const double u = 1.0 + a.real() * rule.x[k], v = a.imag() * rule.x[k];
        const double m = std::sqrt(u * u + v * v);
        const double sr = std::sqrt(0.5 * (m + u)), si = v / (2.0 * sr);
        const double w0 = rule.w[k] / m, w1 = rule.w[k] * rule.x[k];
        i0r += w0 * sr;
        i0i -= w0 * si;
        i1r += w1 * sr;
        i1i += w1 * si;
    }
    // sqrt(2 / (pi z)) e^{i(z - pi/4)} / sqrt(pi), with the principal sqrt(z)
    const double x = z.real(), y = z.imag(), m = std::hypot(x, y);
    const double sq = std::sqrt(0.5 * (m + std::abs(x)));
    const cplx root = x >= 0.0 ? cplx(sq, y / (2.0 * sq)) : cplx(std::abs(y) / (2.0 * sq), std::copysign(sq, y));
    const double decay = std::exp(-y) * (std::sqrt(2.0) / kPi) / m;
    const cplx phase(std::cos(x - 0.25 * kPi), std::sin(x - 0.25 * kPi));
    const cplx pre = decay * phase * std::conj(root);
    return {pre * cplx(i0r, i0i), pre * cplx(2.0 * i1i, -2.0 * i1r)};
}

std::array<cplx, 2> hankel01_upper(cplx z) {
    if (std::abs(z) < kSeriesRadius) return hankel01_small(z);
    return hankel01_integral(z);
}

void check_argument(cplx z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError("Bessel argument must be finite");
    if (z == cplx(0.0, 0.0)) throw DomainError("Bessel argument must be nonzero");
    if (std::abs(z) > kMaxArgument) throw DomainError("Bessel argument exceeds |z| <= 1e4");
}

}  // namespace

std::array<cplx, 2> hankel01_series(cplx z) {
    const SmallArg s = small_argument_series(z);
    const ldcplx h0 = s.j0 + ldcplx(0.0L, 1.0L) * s.y0;
    const ldcplx h1 = s.j1 + ldcplx(0.0L, 1.0L) * s.y1;
    return {cplx(static_cast<double>(h0.real()), static_cast<double>(h0.imag())),
            cplx(static_cast<double>(h1.real()), static_cast<double>(h1.imag()))};
}

namespace raw {

void bessel_j_table(int n, cplx z, cplx* out) {
    const double az = std::abs(z);
    int start = std::max(n, static_cast<int>(std::ceil(1.4 * az))) + 30;
    start += start % 2;
    // e^{-iz} = J0 + 2 sum (-i)^k J_k in the upper half-plane, e^{iz} with i^k below
    const bool upper = z.imag() >= 0.0;
    const cplx unit = upper ? cplx(0.0, -1.0) : cplx(0.0, 1.0);
    std::vector<cplx> up(start + 1);
    up[0] = 1.0;
    for (int k = 1; k <= start; ++k) up[k] = up[k - 1] * unit;
    for (int k = 0; k <= n; ++k) out[k] = 0.0;

    cplx fp1 = 0.0, f = 1e-300;
    cplx sum = 0.0;
    const cplx zinv = 1.0 / z;
    for (int k = start; k >= 1; --k) {
        // f = f_k, fp1 = f_{k+1}
        if (k <= n) out[k] = f;
        sum += 2.0 * up[k] * f;
        const cplx fm1 = (2.0 * k) * zinv * f - fp1;
        fp1 = f;
        f = fm1;
        if (std::abs(f) > 1e200) {
            const double s = 1e-200;
            f *= s;
            fp1 *= s;
            sum *= s;
            for (int m = k; m <= n; ++m) out[m] *= s;
        }
    }
    out[0] = f;
    sum += f;
    const cplx ez = upper ? -kI * z : kI * z;
    if (ez.real() < 300.0) {
        const cplx scale = std::exp(ez) / sum;
        for (int k = 0; k <= n; ++k) out[k] *= scale;
        return;
    }
    // e^{-iz} / sum can overflow while the products stay finite
    const cplx log_scale = ez - std::log(sum);
    for (int k = 0; k <= n; ++k)
        if (out[k] != cplx(0.0, 0.0)) out[k] = std::exp(std::log(out[k]) + log_scale);
}

std::array<cplx, 2> hankel01(cplx z) {
    if (z.imag() >= 0.0) return hankel01_upper(z);
    if (std::abs(z) < kSeriesRadius) return hankel01_small(z);
    // H1(z) = conj(2 J(conj z) - H1(conj z))
    const cplx zc = std::conj(z);
    cplx j[2];
    bessel_j_table(1, zc, j);
    const auto h = hankel01_integral(zc);
    return {std::conj(2.0 * j[0] - h[0]), std::conj(2.0 * j[1] - h[1])};
}

void hankel_table(int n, cplx z, cplx* out) {
    const auto h = hankel01(z);
    out[0] = h[0];
    if (n >= 1) out[1] = h[1];
    const cplx zinv = 1.0 / z;
    for (int m = 1; m < n; ++m) out[m + 1] = (2.0 * m) * zinv * out[m] - out[m - 1];
}

}  // namespace raw

BesselTable bessel_jh(int order_max, cplx z) {
    if (order_max < 0 || order_max > kMaxOrder)
        throw ArgumentError("order_max must lie in [0, 60], got " + std::to_string(order_max));
    check_argument(z);
    BesselTable t;
    t.order_max = order_max;
    t.argument = z;
    t.j.resize(order_max + 1);
    t.h1.resize(order_max + 1);
    raw::bessel_j_table(order_max, z, t.j.data());
    raw::hankel_table(order_max, z, t.h1.data());
    if (std::abs(z) < kSeriesRadius) {
        // the series is sharper than Miller for the two lowest orders here
        const SmallArg s = small_argument_series(z);
        t.j[0] = cplx(static_cast<double>(s.j0.real()), static_cast<double>(s.j0.imag()));
        if (order_max >= 1) t.j[1] = cplx(static_cast<double>(s.j1.real()), static_cast<double>(s.j1.imag()));
    }
    if (z.imag() == 0.0 && z.real() > 0.0)
        for (auto& v : t.j) v.imag(0.0);
    for (int n = 0; n <= order_max; ++n) {
        if (!std::isfinite(t.h1[n].real()) || !std::isfinite(t.h1[n].imag()) || !std::isfinite(t.j[n].real()) ||
            !std::isfinite(t.j[n].imag()))
            throw DomainError("Bessel table overflow at order " + std::to_string(n));
    }
    return t;
}

cplx spherical_h1_0(cplx z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("argument must be finite");
    if (z == cplx(0.0, 0.0)) throw DomainError("spherical Hankel argument must be nonzero");
    return -kI * std::exp(kI * z) / z;
}

}  // namespace mibie::specfun
