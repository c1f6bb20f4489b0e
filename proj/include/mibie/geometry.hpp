#pragma once

#include <variant>
#include <vector>

#include "mibie/types.hpp"

namespace mibie::geometry {

struct Circle {
    Point2 center{};
    double radius = 1.0;
};

struct Ellipse {
    Point2 center{};
    double a = 1.0;  // semi-axis along x
    double b = 1.0;  // semi-axis along y
};

// r(theta) = r0 + sum_k a_k cos(k theta) + b_k sin(k theta), k = 1, 2, ...
struct Fourier {
    Point2 center{};
    double r0 = 1.0;
    std::vector<double> cos_coeffs;
    std::vector<double> sin_coeffs;
};

using Shape = std::variant<Circle, Ellipse, Fourier>;

// Circle of radius 3.5 centred at (5.25, 5.25).
Circle reference_circle();

// Five-lobed curve r = 3 (1 + 0.15 cos 5 theta) about (5.25, 5.25).
Fourier apple_shape();

struct CurveSpec {
    Shape shape;
    int n_panels = 100;
    int nodes_per_panel = 8;
};

void validate(const CurveSpec& spec);

// Position and the first two parameter derivatives at t in [0, 2 pi).
struct CurveSample {
    Point2 x, dx, ddx;
};

CurveSample sample(const Shape& shape, double t);

// Counter-clockwise parametrisation; outward normal is (dy, -dx) / |dx|.
Point2 outward_normal(const CurveSample& s);

struct GaussLegendre {
    std::vector<double> x;     // nodes on [-1, 1], ascending
    std::vector<double> w;     // weights
    std::vector<double> bary;  // barycentric weights of the nodes
};

const GaussLegendre& gauss_legendre(int n);

// Lagrange basis of the rule's nodes evaluated at s in [-1, 1].
void lagrange_weights(const GaussLegendre& rule, double s, double* out);

struct Panel {
    double t0 = 0.0, t1 = 0.0;
    double length = 0.0;
};

struct ClosestPoint {
    double t = 0.0;
    Point2 foot{};
    Point2 normal{};
    double signed_distance = 0.0;  // > 0 outside D
    int panel = 0;
};

class PanelizedCurve {
public:
    PanelizedCurve(Shape shape, std::vector<double> breakpoints, int q);

    const Shape& shape() const { return shape_; }
    int nodes_per_panel() const { return q_; }
    int n_panels() const { return static_cast<int>(panels_.size()); }
    int size() const { return static_cast<int>(x_.size()); }
    const std::vector<Panel>& panels() const { return panels_; }
    const std::vector<double>& breakpoints() const { return breaks_; }

    const std::vector<Point2>& positions() const { return x_; }
    const std::vector<Point2>& normals() const { return n_; }
    const std::vector<double>& weights() const { return w_; }
    const std::vector<double>& params() const { return t_; }

    int panel_of(int node) const { return node / q_; }
    double total_length() const;
    double max_panel_length() const;
    double diameter() const { return diameter_; }

    ClosestPoint closest_point(Point2 x) const;
    bool inside(Point2 x) const { return closest_point(x).signed_distance < 0.0; }
    int panel_at(double t) const;

private:
    Shape shape_;
    std::vector<double> breaks_;
    int q_;
    std::vector<Panel> panels_;
    std::vector<Point2> x_, n_;
    std::vector<double> w_, t_;
    double diameter_ = 0.0;
};

PanelizedCurve build_curve(const CurveSpec& spec);
PanelizedCurve refine(const PanelizedCurve& curve, int factor);

}  // namespace mibie::geometry
