#pragma once

#include <array>
#include <span>
#include <vector>

#include "mibie/types.hpp"

namespace mibie::specfun {

inline constexpr int kMaxOrder = 60;
inline constexpr double kMaxArgument = 1.0e4;

struct BesselTable {
    int order_max = 0;
    cplx argument;
    std::vector<cplx> j;   // J_0 .. J_order_max
    std::vector<cplx> h1;  // H^(1)_0 .. H^(1)_order_max
};

// Cylindrical J_n and H^(1)_n of complex argument, n = 0..order_max.
BesselTable bessel_jh(int order_max, cplx z);

// h^(1)_0(z) = -i e^{iz} / z.
cplx spherical_h1_0(cplx z);

// H^(1)_0 and H^(1)_1 through J + iY, using the power series (any |z|; only
// accurate for small and moderate |z|). Exposed for cross-path checks.
std::array<cplx, 2> hankel01_series(cplx z);

// Unchecked fast paths used inside quadrature loops. Arguments must satisfy
// the bessel_jh preconditions; no validation happens here.
namespace raw {

// {H_0(z), H_1(z)}.
std::array<cplx, 2> hankel01(cplx z);

// H_0 .. H_n written to out[0..n].
void hankel_table(int n, cplx z, cplx* out);

// J_0 .. J_n written to out[0..n].
void bessel_j_table(int n, cplx z, cplx* out);

}  // namespace raw

}  // namespace mibie::specfun
