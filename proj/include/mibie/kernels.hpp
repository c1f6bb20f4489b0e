#pragma once

#include <utility>

#include "mibie/params.hpp"
#include "mibie/types.hpp"

namespace mibie::kernels {

enum class Dim { Two = 2, Three = 3 };

struct HelmholtzValue {
    cplx value;  // (i/4) H_0(k r)
    cplx dr;     // d/dr of value
};

HelmholtzValue helmholtz_kernel_2d(cplx k, double r);

struct GreensPair {
    cplx g_t;
    cplx g_p;
};

// b1, b2 in 2D (Hankel H_0), c1, c2 in 3D (spherical h_0): coefficients of the
// acoustic (k_p) and thermal (k_t) terms of G_T.
struct GreensCoefficients {
    cplx acoustic;
    cplx thermal;
};

GreensCoefficients greens_coefficients(Dim dim, const ModeConstants& m, const GasParams& p);

// -a (k_t^2 - k_p^2) with a the quartic's leading coefficient; equals the
// discriminant root under the labelling used by the closed-form coefficients.
cplx labelled_discriminant(const ModeConstants& m, const GasParams& p);

GreensPair greens_2d(const ModeConstants& m, const GasParams& p, double r);
GreensPair greens_3d(const ModeConstants& m, const GasParams& p, double r);

// Normal derivative at x, direction n_x, of the 2D Green's function centred at y.
GreensPair greens_gradient_2d(const ModeConstants& m, const GasParams& p, Point2 x, Point2 y, Point2 n_x);

// {G_1, G_2}: thermal and acoustic single-mode kernels.
std::pair<GreensPair, GreensPair> g1_g2(Dim dim, const ModeConstants& m, double r);

struct JumpCoefficients {
    cplx c1, c2, d1, d2;
    cplx determinant() const { return c1 * d2 - c2 * d1; }
};

JumpCoefficients jump_coefficients(Dim dim, const ModeConstants& m);

// Repeated evaluation of the 2D Green's function for fixed parameters.
class Greens2D {
public:
    Greens2D(const ModeConstants& m, const GasParams& p);
    GreensPair value(Point2 x, Point2 y) const;
    GreensPair normal_derivative(Point2 x, Point2 y, Point2 n_x) const;
    const GreensCoefficients& coefficients() const { return b_; }

private:
    ModeConstants m_;
    GreensCoefficients b_;
};

}  // namespace mibie::kernels
