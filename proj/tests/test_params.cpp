#include <gtest/gtest.h>

#include <random>

#include "mibie/kernels.hpp"
#include "mibie/params.hpp"
#include "oracles/mp_bessel.hpp"

using namespace mibie;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

// Linear forms of the combined equation: first PDE plus t times the second.
struct LinearForms {
    cplx a1, a2, a3, a4;
};

LinearForms forms(const GasParams& p, cplx t) {
    const double beta = p.gamma * (1.0 - p.lambda / p.omega);
    const double eta = beta + p.lambda / p.omega;
    const double delta = (p.gamma - 1.0) / p.gamma;
    return {p.omega, cplx(1.0, -p.gamma * p.lambda) * t, kI - beta * t, -kI * delta + eta * t};
}

// Plane-wave symbol of the PDE system, with s = k^2.
cplx symbol_det(const GasParams& p, cplx s) {
    const double beta = p.gamma * (1.0 - p.lambda / p.omega);
    const double eta = beta + p.lambda / p.omega;
    const double delta = (p.gamma - 1.0) / p.gamma;
    const cplx c(1.0, -p.gamma * p.lambda);
    const cplx m11 = -p.omega * s + kI, m12 = -kI * delta, m21 = -beta, m22 = -c * s + eta;
    return m11 * m22 - m12 * m21;
}

}  // namespace

TEST(Params, ReferenceWavenumbersToDisplayedDigits) {
    const auto m = derive_modes(reference_params());
    // digits as printed, which truncate rather than round
    EXPECT_EQ(std::trunc(m.k_t.real() * 100.0), 11681.0);
    EXPECT_EQ(std::trunc(m.k_t.imag() * 100.0), 11681.0);
    EXPECT_NEAR(m.k_p.real(), 1.0, 5e-3);
    EXPECT_NEAR(m.k_p.imag(), 3.42e-5, 5e-8);
}

TEST(Params, DiscriminantIdentity) {
    const auto p = reference_params();
    const auto m = derive_modes(p);
    const cplx a(p.gamma * p.omega * p.lambda, p.omega);
    const cplx b(1.0, -p.gamma * p.omega - p.lambda);
    const cplx q2 = 4.0 * a + b * b;
    EXPECT_LT(rel(m.q * m.q, q2), 1e-13);
}

TEST(Params, QuarticResidualAndVieta) {
    const auto p = reference_params();
    const auto m = derive_modes(p);
    const cplx a(p.gamma * p.omega * p.lambda, p.omega);
    const cplx b(1.0, -p.gamma * p.omega - p.lambda);
    for (cplx s : {m.k_t2, m.k_p2}) {
        // each term of the residual can be far larger than the constant, so scale as well
        const double scale = std::abs(a * s * s) + std::abs(b * s) + 1.0;
        EXPECT_LT(std::abs(a * s * s + b * s - 1.0), 1e-12 * scale);
    }
    EXPECT_LT(std::abs(a * m.k_p2 * m.k_p2 + b * m.k_p2 - 1.0), 1e-12);
    EXPECT_LT(rel(m.k_t2 * m.k_p2, -1.0 / a), 1e-12);
}

TEST(Params, ModesAnnihilatePlaneWaveSymbol) {
    const auto p = reference_params();
    const auto m = derive_modes(p);
    for (cplx s : {m.k_t2, m.k_p2}) {
        const cplx c(1.0, -p.gamma * p.lambda);
        const double scale = std::abs(p.omega * s * c * s) + std::abs(s) + 1.0;
        EXPECT_LT(std::abs(symbol_det(p, s)), 1e-12 * scale);
    }
}

TEST(Params, BranchAndLabelling) {
    const auto m = derive_modes(reference_params());
    EXPECT_GE(m.k_t.imag(), 0.0);
    EXPECT_GE(m.k_p.imag(), 0.0);
    EXPECT_GT(std::abs(m.k_t.imag()), std::abs(m.k_p.imag()));
    EXPECT_LT(rel(m.k_t * m.k_t, m.k_t2), 1e-15);
    EXPECT_LT(rel(m.k_p * m.k_p, m.k_p2), 1e-15);
    EXPECT_NEAR(1.0 / m.k_t.imag(), 0.01, 0.002);
}

TEST(Params, ModeRatiosExact) {
    const auto p = reference_params();
    const auto m = derive_modes(p);
    const double g = p.gamma / (p.gamma - 1.0);
    EXPECT_EQ(m.m_t, g * (1.0 + kI * p.omega * m.k_t2));
    EXPECT_EQ(m.m_p, g * (1.0 + kI * p.omega * m.k_p2));
}

TEST(Params, DecouplingQuadraticFromLinearForms) {
    const auto p = reference_params();
    const auto m = derive_modes(p);
    for (cplx t : {m.t_plus, m.t_minus}) {
        const auto f = forms(p, t);
        const auto f0 = forms(p, 0.0);
        // both products nearly cancel at the small root, so scale by their monomials
        const double scale = std::abs(f.a1) * (std::abs(f0.a4) + std::abs(f.a4 - f0.a4)) +
                             std::abs(f.a2) * (std::abs(f0.a3) + std::abs(f.a3 - f0.a3));
        EXPECT_LT(std::abs(f.a1 * f.a4 - f.a2 * f.a3), 1e-12 * scale);
    }
    // Vieta: the constant and leading coefficients of a1 a4 - a2 a3
    const auto f0 = forms(p, 0.0), f1 = forms(p, 1.0), fm = forms(p, -1.0);
    const cplx q0 = f0.a1 * f0.a4 - f0.a2 * f0.a3;
    const cplx q1 = f1.a1 * f1.a4 - f1.a2 * f1.a3;
    const cplx qm = fm.a1 * fm.a4 - fm.a2 * fm.a3;
    const cplx lead = 0.5 * (q1 + qm) - q0;
    EXPECT_LT(rel(m.t_plus * m.t_minus, q0 / lead), 1e-12);
    const auto [qa, qb, qc] = decoupling_quadratic(p);
    EXPECT_LT(rel(qa, lead), 1e-12);
    EXPECT_LT(rel(qc, q0), 1e-12);
}

TEST(Params, ExplicitRootsAndQSignGiveSameSets) {
    const auto p = reference_params();
    const auto m = derive_modes(p);
    const auto e1 = decoupling_roots_explicit(p, m.q);
    const auto e2 = decoupling_roots_explicit(p, -m.q);
    auto same_set = [](std::array<cplx, 2> a, std::array<cplx, 2> b) {
        const double d1 = std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]);
        const double d2 = std::abs(a[0] - b[1]) + std::abs(a[1] - b[0]);
        return std::min(d1, d2) <= 1e-10 * (std::abs(a[0]) + std::abs(a[1]));
    };
    EXPECT_TRUE(same_set(e1, e2));
    EXPECT_TRUE(same_set(e1, {m.t_plus, m.t_minus}));
    // k^2 from the textbook formula with either sign of Q
    const cplx a(p.gamma * p.omega * p.lambda, p.omega);
    const cplx b(1.0, -p.gamma * p.omega - p.lambda);
    const std::array<cplx, 2> s1 = {(-b + m.q) / (2.0 * a), (-b - m.q) / (2.0 * a)};
    const std::array<cplx, 2> s2 = {(-b - m.q) / (2.0 * a), (-b + m.q) / (2.0 * a)};
    EXPECT_TRUE(same_set(s1, s2));
    EXPECT_LT(std::min(rel(s1[0], m.k_t2), rel(s1[1], m.k_t2)), 1e-9);
}

TEST(Params, BranchStabilityUnderPerturbation) {
    const auto p = reference_params();
    const auto m = derive_modes(p);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        GasParams q = p;
        q.omega *= 1.0 + 1e-9 * u(rng);
        q.gamma *= 1.0 + 1e-9 * u(rng);
        q.lambda *= 1.0 + 1e-9 * u(rng);
        const auto n = derive_modes(q);
        EXPECT_LT(rel(n.k_t, m.k_t), 1e-6);
        EXPECT_LT(rel(n.k_p, m.k_p), 1e-6);
        EXPECT_EQ(n.pairing_swapped, m.pairing_swapped);
    }
}

// Helmholtz residual of V = Omega T + t c P for a sum of point sources,
// with the field and a central-difference Laplacian evaluated in multiprecision.
TEST(Params, PairingMakesThermalCombinationHelmholtz) {
    using oracle::mp_complex;
    using oracle::mp_real;
    const auto p = reference_params();
    const auto m = derive_modes(p);
    const auto b = kernels::greens_coefficients(kernels::Dim::Two, m, p);
    const cplx c = pressure_scale(p);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    struct Src {
        double x, y;
        cplx s;
    };
    std::vector<Src> src;
    for (int i = 0; i < 3; ++i) src.push_back({u(rng), u(rng), cplx(u(rng), u(rng)) * 20.0});
    auto field = [&](cplx t, const mp_real& x, const mp_real& y) {
        const mp_complex wt = oracle::to_mp(p.omega + t * c * m.m_t), wp = oracle::to_mp(p.omega + t * c * m.m_p);
        mp_complex v = 0;
        for (const auto& s : src) {
            const mp_real r = sqrt((x - s.x) * (x - s.x) + (y - s.y) * (y - s.y));
            v += oracle::to_mp(s.s) * (wp * oracle::to_mp(b.acoustic) * oracle::hankel(0, oracle::to_mp(m.k_p) * r) +
                                       wt * oracle::to_mp(b.thermal) * oracle::hankel(0, oracle::to_mp(m.k_t) * r));
        }
        return v;
    };
    auto residual = [&](cplx t, cplx k, double px, double py) {
        const mp_real h("1e-30"), x(px), y(py);
        const mp_complex v0 = field(t, x, y);
        const mp_complex lap = (field(t, x + h, y) + field(t, x - h, y) + field(t, x, y + h) +
                                field(t, x, y - h) - 4 * v0) /
                               (h * h);
        const mp_complex kk = oracle::to_mp(k * k);
        return static_cast<double>(abs(lap + kk * v0) / abs(kk * v0));
    };
    for (const auto& pt : {std::pair{0.12, 0.03}, std::pair{-0.08, 0.11}}) {
        EXPECT_LT(residual(m.t_plus, m.k_t, pt.first, pt.second), 1e-8);
        EXPECT_LT(residual(m.t_minus, m.k_p, pt.first, pt.second), 1e-8);
        // the swapped pairing is far from a Helmholtz field
        EXPECT_GT(residual(m.t_minus, m.k_t, pt.first, pt.second), 1e-2);
    }
}

TEST(Params, TransformConditionAndInverse) {
    const auto p = reference_params();
    const auto m = derive_modes(p);
    const auto tr = build_transform(m, p);
    EXPECT_NEAR(tr.cond2, 4.19e4, 0.01 * 4.19e4);
    const Mat2 id = tr.forward * tr.inverse;
    EXPECT_LT(std::abs(id.a - 1.0) + std::abs(id.b) + std::abs(id.c) + std::abs(id.d - 1.0), 1e-12);
    std::mt19937 rng(9);
    std::normal_distribution<double> g;
    for (int i = 0; i < 20; ++i) {
        const cplx x(g(rng), g(rng)), y(g(rng), g(rng));
        const auto v = apply(tr.forward, x, y);
        const auto w = apply(tr.inverse, v[0], v[1]);
        EXPECT_LT(std::abs(w[0] - x) + std::abs(w[1] - y), 1e-11 * (std::abs(x) + std::abs(y)));
    }
    // 2x2 singular values against Eigen's SVD
    EXPECT_GE(tr.cond2, 1.0);
    EXPECT_DOUBLE_EQ(cond2({1.0, 0.0, 0.0, 1.0}), 1.0);
    EXPECT_NEAR(cond2({2.0, 0.0, 0.0, 0.5}), 4.0, 1e-14);
}

TEST(Params, RejectsInadmissibleParameters) {
    EXPECT_THROW(derive_modes({1e-5, 0.9, 1e-5}), ArgumentError);
    EXPECT_THROW(derive_modes({-1e-5, 1.4, 1e-5}), ArgumentError);
    EXPECT_THROW(derive_modes({1e-5, 1.4, 0.0}), ArgumentError);
    EXPECT_THROW(derive_modes({std::nan(""), 1.4, 1e-5}), ArgumentError);
    GasParams same = reference_params();
    same.lambda = same.omega;
    const auto m = derive_modes(reference_params());
    EXPECT_THROW(decoupling_roots(same, m), DegenerateError);
}
