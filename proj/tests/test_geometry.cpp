#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <random>

#include "mibie/geometry.hpp"

using namespace mibie;
using namespace mibie::geometry;

namespace {

double adaptive_length(const Shape& shape) {
    auto speed = [&](double t) { return norm(sample(shape, t).dx); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(speed, 0.0, 2.0 * kPi, 8, 1e-14);
}

}  // namespace

TEST(Geometry, ReferenceCircleLengthAndNodes) {
    const auto c = build_curve({reference_circle(), 100, 8});
    EXPECT_EQ(c.size(), 800);
    EXPECT_EQ(c.n_panels(), 100);
    EXPECT_NEAR(c.total_length(), 7.0 * kPi, 1e-12);
    double wsum = 0.0;
    for (double w : c.weights()) wsum += w;
    EXPECT_NEAR(wsum, 7.0 * kPi, 1e-12);
    EXPECT_NEAR(c.max_panel_length(), 7.0 * kPi / 100.0, 1e-12);
    EXPECT_NEAR(c.diameter(), 7.0, 1e-3);
}

TEST(Geometry, CircleNormalsAreRadial) {
    const auto circle = reference_circle();
    const auto c = build_curve({circle, 20, 6});
    for (int i = 0; i < c.size(); ++i) {
        const Point2 d = c.positions()[i] - circle.center;
        EXPECT_NEAR(norm(d), circle.radius, 1e-13);
        EXPECT_NEAR(c.normals()[i].x, d.x / circle.radius, 1e-13);
        EXPECT_NEAR(c.normals()[i].y, d.y / circle.radius, 1e-13);
    }
}

TEST(Geometry, EllipseNormalsMatchGradient) {
    const Ellipse e{{1.0, -2.0}, 2.0, 0.7};
    const auto c = build_curve({e, 16, 5});
    for (int i = 0; i < c.size(); ++i) {
        const Point2 d = c.positions()[i] - e.center;
        const Point2 g{d.x / (e.a * e.a), d.y / (e.b * e.b)};
        const double l = norm(g);
        EXPECT_NEAR(c.normals()[i].x, g.x / l, 1e-13);
        EXPECT_NEAR(c.normals()[i].y, g.y / l, 1e-13);
    }
}

TEST(Geometry, LengthsAgainstAdaptiveQuadrature) {
    const std::vector<Shape> shapes = {Ellipse{{0.0, 0.0}, 3.0, 1.0}, apple_shape(),
                                       Fourier{{0.5, 0.5}, 2.0, {0.1, 0.0, 0.05}, {0.0, 0.2}}};
    for (const auto& s : shapes) {
        const auto c = build_curve({s, 64, 10});
        EXPECT_NEAR(c.total_length(), adaptive_length(s), 1e-11 * adaptive_length(s));
    }
}

TEST(Geometry, SampleDerivativesMatchFiniteDifferences) {
    const std::vector<Shape> shapes = {reference_circle(), Ellipse{{0.0, 0.0}, 3.0, 1.0}, apple_shape()};
    const double h = 1e-5;
    for (const auto& s : shapes) {
        for (double t : {0.0, 0.7, 2.5, 5.9}) {
            const auto a = sample(s, t), p = sample(s, t + h), m = sample(s, t - h);
            EXPECT_NEAR(a.dx.x, (p.x.x - m.x.x) / (2 * h), 1e-8);
            EXPECT_NEAR(a.dx.y, (p.x.y - m.x.y) / (2 * h), 1e-8);
            EXPECT_NEAR(a.ddx.x, (p.dx.x - m.dx.x) / (2 * h), 1e-7);
            EXPECT_NEAR(a.ddx.y, (p.dx.y - m.dx.y) / (2 * h), 1e-7);
        }
    }
}

TEST(Geometry, AppleParameters) {
    const auto a = apple_shape();
    EXPECT_DOUBLE_EQ(a.r0, 3.0);
    EXPECT_DOUBLE_EQ(a.center.x, 5.25);
    EXPECT_DOUBLE_EQ(a.center.y, 5.25);
    const auto s = sample(a, 0.0);
    EXPECT_NEAR(s.x.x - a.center.x, 3.45, 1e-14);
}

TEST(Geometry, RefinementHalvesPanels) {
    const auto c = build_curve({reference_circle(), 25, 4});
    const auto r = refine(c, 2);
    EXPECT_EQ(r.n_panels(), 50);
    EXPECT_EQ(r.size(), 200);
    EXPECT_NEAR(r.max_panel_length(), 0.5 * c.max_panel_length(), 1e-13);
    EXPECT_NEAR(r.total_length(), c.total_length(), 1e-12);
    EXPECT_THROW(refine(c, 1), ArgumentError);
}

TEST(Geometry, PanelQuadratureConvergesForSmoothIntegrands) {
    // integral of exp(4 cos theta) over the circle: 2 pi R I_0(4)
    const auto circle = reference_circle();
    const double exact = 2.0 * kPi * circle.radius * boost::math::cyl_bessel_i(0, 4.0);
    double prev = INFINITY;
    for (int q : {2, 4, 6, 8}) {
        const auto c = build_curve({circle, 6, q});
        double s = 0.0;
        for (int i = 0; i < c.size(); ++i) s += c.weights()[i] * std::exp(4.0 * std::cos(c.params()[i]));
        const double err = std::abs(s - exact) / exact;
        EXPECT_LT(err, prev);
        prev = err;
    }
    EXPECT_LT(prev, 1e-9);
}

TEST(Geometry, GaussLegendreExactness) {
    for (int n : {1, 2, 5, 16, 40}) {
        const auto& g = gauss_legendre(n);
        ASSERT_EQ(static_cast<int>(g.x.size()), n);
        for (int d = 0; d <= 2 * n - 1; ++d) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += g.w[i] * std::pow(g.x[i], d);
            const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
            EXPECT_NEAR(s, exact, 1e-13) << n << " " << d;
        }
        for (int i = 1; i < n; ++i) EXPECT_LT(g.x[i - 1], g.x[i]);
    }
    EXPECT_THROW(gauss_legendre(0), ArgumentError);
}

TEST(Geometry, LagrangeInterpolationReproducesPolynomials) {
    const auto& g = gauss_legendre(6);
    std::vector<double> l(6);
    for (double s : {-1.0, -0.3, 0.0, 0.45, 1.0}) {
        lagrange_weights(g, s, l.data());
        double one = 0.0, cube = 0.0, fifth = 0.0;
        for (int j = 0; j < 6; ++j) {
            one += l[j];
            cube += l[j] * std::pow(g.x[j], 3);
            fifth += l[j] * std::pow(g.x[j], 5);
        }
        EXPECT_NEAR(one, 1.0, 1e-14);
        EXPECT_NEAR(cube, s * s * s, 1e-14);
        EXPECT_NEAR(fifth, std::pow(s, 5), 1e-13);
    }
    lagrange_weights(g, g.x[2], l.data());
    EXPECT_EQ(l[2], 1.0);
}

TEST(Geometry, InterpolationErrorDecaysWithPanelCount) {
    // interpolate cos(5 theta) from panel nodes to panel midpoints; error ~ h^q
    const auto circle = reference_circle();
    const int q = 4;
    std::vector<double> errs, hs;
    std::vector<double> l(q);
    for (int n : {16, 32, 64}) {
        const auto c = build_curve({circle, n, q});
        lagrange_weights(gauss_legendre(q), 0.1, l.data());
        double e = 0.0;
        for (int p = 0; p < n; ++p) {
            const auto& pn = c.panels()[p];
            const double t = pn.t0 + 0.55 * (pn.t1 - pn.t0);
            double v = 0.0;
            for (int j = 0; j < q; ++j) v += l[j] * std::cos(5 * c.params()[p * q + j]);
            e = std::max(e, std::abs(v - std::cos(5 * t)));
        }
        errs.push_back(e);
        hs.push_back(c.max_panel_length());
    }
    for (std::size_t i = 1; i < errs.size(); ++i) {
        const double rate = std::log(errs[i - 1] / errs[i]) / std::log(hs[i - 1] / hs[i]);
        EXPECT_NEAR(rate, q, 0.5);
    }
}

TEST(Geometry, ClosestPointAndSides) {
    const auto circle = reference_circle();
    const auto c = build_curve({circle, 40, 6});
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> ang(0.0, 2 * kPi), rad(0.5, 6.0);
    for (int i = 0; i < 50; ++i) {
        const double a = ang(rng), r = rad(rng);
        const Point2 x = circle.center + r * Point2{std::cos(a), std::sin(a)};
        const auto cp = c.closest_point(x);
        EXPECT_NEAR(cp.signed_distance, r - circle.radius, 1e-10);
        EXPECT_EQ(c.inside(x), r < circle.radius);
        EXPECT_NEAR(norm(cp.foot - circle.center), circle.radius, 1e-12);
        const double wrapped = std::remainder(cp.t - a, 2 * kPi);
        EXPECT_NEAR(wrapped, 0.0, 1e-9);
        EXPECT_EQ(cp.panel, c.panel_at(cp.t));
    }
}

TEST(Geometry, RejectsInvalidSpecs) {
    EXPECT_THROW(build_curve({reference_circle(), 3, 4}), ArgumentError);
    EXPECT_THROW(build_curve({reference_circle(), 10, 1}), ArgumentError);
    EXPECT_THROW(build_curve({reference_circle(), 10, 65}), ArgumentError);
    EXPECT_THROW(build_curve({Circle{{0, 0}, -1.0}, 10, 4}), ArgumentError);
    EXPECT_THROW(build_curve({Ellipse{{0, 0}, 1.0, 0.0}, 10, 4}), ArgumentError);
    EXPECT_THROW(build_curve({Fourier{{0, 0}, 1.0, {1.5}, {}}, 10, 4}), ArgumentError);
}
