#pragma once

#include <array>

#include "mibie/types.hpp"

namespace mibie {

struct GasParams {
    double omega = 0.0;   // Omega
    double gamma = 0.0;   // gamma
    double lambda = 0.0;  // Lambda
};

// Dimensionless parameters of the reference experiments.
GasParams reference_params();

// Throws ArgumentError unless all entries are finite and positive with gamma > 1.
void validate(const GasParams& p);

struct ModeConstants {
    cplx q;  // principal sqrt of the discriminant
    cplx k_t, k_p;
    cplx k_t2, k_p2;  // squared wavenumbers as computed from the quartic
    cplx m_t, m_p;    // P/T ratio of each mode
    cplx t_plus, t_minus;
    bool pairing_swapped = false;  // explicit root formula ordering needed a swap
};

// 1 - i*gamma*Lambda
cplx pressure_scale(const GasParams& p);

ModeConstants derive_modes(const GasParams& p);

// Quadratic a1*a4 - a2*a3 = A t^2 + B t + C.
std::array<cplx, 3> decoupling_quadratic(const GasParams& p);

// Explicit closed form of the two roots, in the order it defines them.
std::array<cplx, 2> decoupling_roots_explicit(const GasParams& p, cplx q);

// Returns {t_plus, t_minus}; t_plus pairs with k_t.
std::array<cplx, 2> decoupling_roots(const GasParams& p, const ModeConstants& m);

// Source factor a5(t) = 1 - i gamma Lambda / Omega * t.
cplx source_factor(const GasParams& p, cplx t);

struct Mat2 {
    cplx a, b, c, d;  // [[a, b], [c, d]]
};

inline std::array<cplx, 2> apply(const Mat2& m, cplx x, cplx y) { return {m.a * x + m.b * y, m.c * x + m.d * y}; }
Mat2 operator*(const Mat2& l, const Mat2& r);

struct DecouplingTransform {
    Mat2 forward;  // (T, P) -> (V_t, V_p)
    Mat2 inverse;
    double cond2 = 0.0;
};

DecouplingTransform build_transform(const ModeConstants& m, const GasParams& p);

// Spectral condition number of a 2x2 complex matrix.
double cond2(const Mat2& m);

}  // namespace mibie
