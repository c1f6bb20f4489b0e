#include <gtest/gtest.h>

#include "mibie/kernels.hpp"
#include "mibie/params.hpp"
#include "oracles/mp_bessel.hpp"

using namespace mibie;
using namespace mibie::kernels;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

struct Fixture : ::testing::Test {
    GasParams p = reference_params();
    ModeConstants m = derive_modes(p);
    double beta = p.gamma * (1.0 - p.lambda / p.omega);
    double eta = beta + p.lambda / p.omega;
    double delta = (p.gamma - 1.0) / p.gamma;
    cplx c = pressure_scale(p);

    // Homogeneous PDE operator applied to (T, P) given their Laplacians.
    std::pair<cplx, cplx> pde(cplx t, cplx pr, cplx lap_t, cplx lap_p) const {
        return {p.omega * lap_t + kI * t - kI * delta * pr, c * lap_p + eta * pr - beta * t};
    }
};

using KernelTest = Fixture;

}  // namespace

TEST_F(KernelTest, HelmholtzKernelReferenceValue) {
    const auto v = helmholtz_kernel_2d(1.0, 1.0);
    const cplx ref = 0.25 * kI * oracle::hankel_d(0, 1.0);
    EXPECT_LT(rel(v.value, ref), 1e-14);
    EXPECT_NEAR(v.value.real(), -0.25 * 0.088256964215677, 1e-14);
    EXPECT_NEAR(v.value.imag(), 0.25 * 0.765197686557967, 1e-14);
}

TEST_F(KernelTest, HelmholtzKernelDecaysForThermalWavenumber) {
    const double a5 = std::abs(helmholtz_kernel_2d(m.k_t, 5.0).value);
    const double a10 = std::abs(helmholtz_kernel_2d(m.k_t, 10.0).value);
    const double a20 = std::abs(helmholtz_kernel_2d(m.k_t, 20.0).value);
    EXPECT_GT(a5, a10);
    EXPECT_GE(a10, a20);
    // |H_0(z)| ~ sqrt(2 / (pi |z|)) e^{-Im z}
    const cplx z = m.k_t * 5.0;
    const double asym = 0.25 * std::sqrt(2.0 / (kPi * std::abs(z))) * std::exp(-z.imag());
    EXPECT_NEAR(a5 / asym, 1.0, 1e-2);
}

TEST_F(KernelTest, HelmholtzRadialDerivativeMatchesFiniteDifference) {
    for (auto [k, r] : {std::pair<cplx, double>{m.k_p, 1.0}, {m.k_p, 3.0}, {m.k_t, 0.05}, {cplx(2.0, 0.5), 0.7}}) {
        const double h = 1e-6;
        const cplx fd = (helmholtz_kernel_2d(k, r + h).value - helmholtz_kernel_2d(k, r - h).value) / (2.0 * h);
        EXPECT_LT(rel(helmholtz_kernel_2d(k, r).dr, fd), 1e-6) << k << " " << r;
    }
}

TEST_F(KernelTest, GreensCoefficientSystem) {
    const auto b = greens_coefficients(Dim::Two, m, p);
    EXPECT_LT(std::abs(4.0 * kI * p.omega * (b.acoustic + b.thermal) - 1.0), 1e-12);
    const cplx lhs = 4.0 * kI * c * (b.acoustic * m.m_p + b.thermal * m.m_t);
    const cplx rhs = -kI * p.gamma * p.lambda / p.omega;
    EXPECT_LT(rel(lhs, rhs), 1e-12);
    const auto c3 = greens_coefficients(Dim::Three, m, p);
    EXPECT_LT(std::abs(4.0 * kPi * kI * p.omega * (c3.acoustic / m.k_p + c3.thermal / m.k_t) - 1.0), 1e-12);
}

TEST_F(KernelTest, LabelledDiscriminantIsPlusOrMinusQ) {
    const cplx d = labelled_discriminant(m, p);
    EXPECT_LT(std::min(rel(d, m.q), rel(d, -m.q)), 1e-10);
}

TEST_F(KernelTest, Greens2DSatisfiesPdeByFiniteDifferences) {
    const Greens2D g(m, p);
    const double h = 1e-4;
    for (Point2 x : {Point2{0.5, 0.0}, Point2{0.3, 0.4}}) {
        auto at = [&](double dx, double dy) { return g.value({x.x + dx, x.y + dy}, {0.0, 0.0}); };
        const auto g0 = at(0, 0), ge = at(h, 0), gw = at(-h, 0), gn = at(0, h), gs = at(0, -h);
        const cplx lt = (ge.g_t + gw.g_t + gn.g_t + gs.g_t - 4.0 * g0.g_t) / (h * h);
        const cplx lp = (ge.g_p + gw.g_p + gn.g_p + gs.g_p - 4.0 * g0.g_p) / (h * h);
        const auto [r1, r2] = pde(g0.g_t, g0.g_p, lt, lp);
        const double mag = std::abs(g0.g_t) + std::abs(g0.g_p);
        EXPECT_LT(std::abs(r1) / mag, 1e-5);
        EXPECT_LT(std::abs(r2) / mag, 1e-5);
    }
}

TEST_F(KernelTest, Greens2DIsRadial) {
    const auto a = greens_2d(m, p, 0.5);
    const Greens2D g(m, p);
    for (Point2 x : {Point2{0.5, 0.0}, Point2{0.0, 0.5}, Point2{-0.5, 0.0}, Point2{0.0, -0.5}}) {
        const auto v = g.value(x, {0.0, 0.0});
        EXPECT_EQ(v.g_t, a.g_t);
        EXPECT_EQ(v.g_p, a.g_p);
    }
    const auto v1 = g.value({1.3, 0.2}, {1.0, -0.2}), v2 = g.value({0.0, 0.0}, {0.3, 0.4});
    EXPECT_LT(rel(v1.g_t, v2.g_t), 1e-15);
}

TEST_F(KernelTest, ThermalTermNegligibleAwayFromSource) {
    const auto b = greens_coefficients(Dim::Two, m, p);
    const double r = 0.2;
    const double acoustic = std::abs(b.acoustic * oracle::hankel_d(0, m.k_p * r));
    const double thermal = std::abs(b.thermal * oracle::hankel_d(0, m.k_t * r));
    EXPECT_GT(acoustic / thermal, 1e6);
}

TEST_F(KernelTest, Greens3DSatisfiesPdeByFiniteDifferences) {
    const double h = 1e-4, r0 = 0.3;
    auto at = [&](double x, double y, double z) { return greens_3d(m, p, std::sqrt(x * x + y * y + z * z)); };
    const double x = r0 / std::sqrt(3.0);
    const auto g0 = at(x, x, x);
    cplx lt = -6.0 * g0.g_t, lp = -6.0 * g0.g_p;
    for (int axis = 0; axis < 3; ++axis)
        for (double s : {h, -h}) {
            const auto v = at(x + (axis == 0) * s, x + (axis == 1) * s, x + (axis == 2) * s);
            lt += v.g_t;
            lp += v.g_p;
        }
    lt /= h * h;
    lp /= h * h;
    const auto [r1, r2] = pde(g0.g_t, g0.g_p, lt, lp);
    const double mag = std::abs(g0.g_t) + std::abs(g0.g_p);
    EXPECT_LT(std::abs(r1) / mag, 1e-4);
    EXPECT_LT(std::abs(r2) / mag, 1e-4);
}

TEST_F(KernelTest, Greens3DClosedForm) {
    const auto c3 = greens_coefficients(Dim::Three, m, p);
    for (double r : {0.01, 0.3, 2.0}) {
        const cplx hp = -kI * std::exp(kI * m.k_p * r) / (m.k_p * r);
        const cplx ht = -kI * std::exp(kI * m.k_t * r) / (m.k_t * r);
        const auto g = greens_3d(m, p, r);
        EXPECT_LT(rel(g.g_t, c3.acoustic * hp + c3.thermal * ht), 1e-14);
        EXPECT_LT(rel(g.g_p, c3.acoustic * m.m_p * hp + c3.thermal * m.m_t * ht), 1e-14);
    }
}

TEST_F(KernelTest, SingleModeKernels) {
    for (double r : {0.01, 0.2, 1.0, 4.0}) {
        const auto [g1, g2] = g1_g2(Dim::Two, m, r);
        EXPECT_EQ(g1.g_p, m.m_t * g1.g_t);
        EXPECT_EQ(g2.g_p, m.m_p * g2.g_t);
        EXPECT_LT(rel(g2.g_t, 0.25 * kI * oracle::hankel_d(0, m.k_p * r)), 1e-13);
        const auto [h1, h2] = g1_g2(Dim::Three, m, r);
        const cplx ref = -m.k_p / (4.0 * kPi * kI) * (-kI * std::exp(kI * m.k_p * r) / (m.k_p * r));
        EXPECT_LT(rel(h2.g_t, ref), 1e-14);
        EXPECT_LT(rel(h2.g_p, m.m_p * ref), 1e-14);
        EXPECT_EQ(h1.g_p, m.m_t * h1.g_t);
    }
}

TEST_F(KernelTest, SingleModeKernelFromHelmholtzRelation) {
    // (lap + k_p^2) G = b2 (k_p^2 - k_t^2) H_0(k_t r) [1, m_t] for the 2D Green's function
    const auto b = greens_coefficients(Dim::Two, m, p);
    const auto c3 = greens_coefficients(Dim::Three, m, p);
    const cplx q = labelled_discriminant(m, p);
    for (int i = 0; i < 20; ++i) {
        const double r = 0.002 + 0.01 * i;
        const cplx ht = oracle::hankel_d(0, m.k_t * r);
        const cplx lhs_t = b.thermal * (m.k_p2 - m.k_t2) * ht;
        const cplx factor = -p.omega * c / (4.0 * b.thermal * q);
        const auto [g1, g2] = g1_g2(Dim::Two, m, r);
        EXPECT_LT(rel(g1.g_t, factor * lhs_t), 1e-12) << r;
        EXPECT_LT(rel(g1.g_p, factor * m.m_t * lhs_t), 1e-12) << r;
        // 3D: alpha_1 = k_t / pi with the k-divided coefficients
        const cplx h0 = -kI * std::exp(kI * m.k_t * r) / (m.k_t * r);
        const cplx lhs3 = c3.thermal * (m.k_p2 - m.k_t2) * h0;
        const cplx factor3 = -(m.k_t / kPi) * p.omega * c / (4.0 * c3.thermal * q);
        const auto [h1, h2] = g1_g2(Dim::Three, m, r);
        EXPECT_LT(rel(h1.g_t, factor3 * lhs3), 1e-12) << r;
    }
}

TEST_F(KernelTest, JumpCoefficients) {
    const auto j2 = jump_coefficients(Dim::Two, m);
    EXPECT_EQ(j2.c1, 1.0);
    EXPECT_EQ(j2.c2, 1.0);
    EXPECT_EQ(j2.d1, m.m_t);
    EXPECT_EQ(j2.d2, m.m_p);
    EXPECT_LT(rel(j2.determinant(), m.m_p - m.m_t), 1e-15);
    EXPECT_GT(std::abs(j2.determinant()), 1.0);
    const auto j3 = jump_coefficients(Dim::Three, m);
    EXPECT_LT(rel(j3.c1, j2.c1 / m.k_t), 1e-15);
    EXPECT_LT(rel(j3.c2, j2.c2 / m.k_p), 1e-15);
    EXPECT_LT(rel(j3.d1, j2.d1 / m.k_t), 1e-15);
    EXPECT_LT(rel(j3.d2, j2.d2 / m.k_p), 1e-15);
}

TEST_F(KernelTest, GradientMatchesFiniteDifferences) {
    const Greens2D g(m, p);
    const double h = 1e-6;
    const Point2 y{0.1, -0.2};
    for (Point2 x : {Point2{0.6, 0.1}, Point2{0.12, -0.17}, Point2{-1.0, 2.0}}) {
        const Point2 n{0.6, 0.8};
        const auto d = greens_gradient_2d(m, p, x, y, n);
        const auto gp = g.value(x + h * n, y), gm = g.value(x - h * n, y);
        EXPECT_LT(rel(d.g_t, (gp.g_t - gm.g_t) / (2.0 * h)), 1e-6);
        EXPECT_LT(rel(d.g_p, (gp.g_p - gm.g_p) / (2.0 * h)), 1e-6);
        const auto dm = greens_gradient_2d(m, p, x, y, -1.0 * n);
        EXPECT_EQ(dm.g_t, -d.g_t);
        EXPECT_EQ(dm.g_p, -d.g_p);
    }
    // tangent of a circle centred at the source
    const Point2 x{y.x + 0.3, y.y};
    const auto t = greens_gradient_2d(m, p, x, y, {0.0, 1.0});
    EXPECT_EQ(t.g_t, cplx(0.0));
    EXPECT_EQ(t.g_p, cplx(0.0));
}

TEST_F(KernelTest, RejectsBadRadii) {
    EXPECT_THROW(helmholtz_kernel_2d(1.0, 0.0), DomainError);
    EXPECT_THROW(helmholtz_kernel_2d(1.0, -1.0), DomainError);
    EXPECT_THROW(helmholtz_kernel_2d(0.0, 1.0), DomainError);
    EXPECT_THROW(greens_2d(m, p, 0.0), DomainError);
    EXPECT_THROW(greens_3d(m, p, -1.0), DomainError);
    EXPECT_THROW(g1_g2(Dim::Two, m, 0.0), DomainError);
    EXPECT_THROW(greens_gradient_2d(m, p, {1.0, 1.0}, {1.0, 1.0}, {1.0, 0.0}), DomainError);
}
