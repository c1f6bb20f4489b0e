#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "mibie/types.hpp"

namespace mibie::solver {

// out = A * in
using ApplyFn = std::function<void(std::span<const cplx> in, std::span<cplx> out)>;

struct SolveReport {
    int iterations = 0;
    std::vector<double> residual_history;  // relative residual, entry 0 is the initial residual
    bool converged = false;
    std::vector<cplx> solution;
    double wall_time = 0.0;         // seconds
    double true_residual = 0.0;     // ||b - A x|| / ||b|| recomputed at exit
    double orthogonality_loss = 0.0;  // max |V^H V - I| of the Krylov basis
    int reorthogonalizations = 0;
};

// Non-restarted GMRES from a zero initial guess.
SolveReport gmres(const ApplyFn& apply, std::span<const cplx> rhs, double tol, int max_iter);

inline constexpr int kSpectrumMaxSize = 8192;

// All eigenvalues of a dense complex matrix: Householder reduction to
// Hessenberg form, then single-shift QR with deflation.
std::vector<cplx> spectrum(const Eigen::MatrixXcd& matrix);

}  // namespace mibie::solver
