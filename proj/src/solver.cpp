#include "mibie/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

namespace mibie::solver {

namespace {

constexpr double kReorthThreshold = 1e-12;

double vnorm(std::span<const cplx> v) {
    double s = 0.0;
    for (const cplx& x : v) s += std::norm(x);
    return std::sqrt(s);
}

cplx vdot(std::span<const cplx> a, std::span<const cplx> b) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

// G = [[c, s], [-conj(s), c]] with G [a; b] = [r; 0].
void givens(cplx a, cplx b, double& c, cplx& s, cplx& r) {
    const double aa = std::abs(a), bb = std::abs(b);
    if (bb == 0.0) {
        c = 1.0;
        s = 0.0;
        r = a;
        return;
    }
    if (aa == 0.0) {
        c = 0.0;
        s = std::conj(b) / bb;
        r = bb;
        return;
    }
    const double nrm = std::hypot(aa, bb);
    const cplx phase = a / aa;
    c = aa / nrm;
    s = phase * std::conj(b) / nrm;
    r = phase * nrm;
}

}  // namespace

SolveReport gmres(const ApplyFn& apply, std::span<const cplx> rhs, double tol, int max_iter) {
    if (!(tol > 0.0)) throw ArgumentError("GMRES tolerance must be positive");
    if (max_iter < 1) throw ArgumentError("max_iter must be at least 1");
    for (const cplx& b : rhs)
        if (!std::isfinite(b.real()) || !std::isfinite(b.imag())) throw ArgumentError("right-hand side is not finite");
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = rhs.size();
    SolveReport rep;
    rep.solution.assign(n, cplx(0.0));
    const double bnorm = vnorm(rhs);
    rep.residual_history.push_back(bnorm == 0.0 ? 0.0 : 1.0);
    if (bnorm == 0.0) {
        rep.converged = true;
        rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return rep;
    }
    const int m = static_cast<int>(std::min<std::size_t>(max_iter, n));
    std::vector<std::vector<cplx>> v;
    v.reserve(m + 1);
    v.emplace_back(rhs.begin(), rhs.end());
    for (auto& x : v[0]) x /= bnorm;
    // h: column j holds H(0..j+1, j), already rotated
    std::vector<std::vector<cplx>> h;
    std::vector<double> cs;
    std::vector<cplx> sn, g{cplx(bnorm)};
    int k = 0;
    std::vector<cplx> w(n);
    for (; k < m; ++k) {
        apply(v[k], w);
        const double before = vnorm(w);
        std::vector<cplx> col(k + 2, cplx(0.0));
        for (int i = 0; i <= k; ++i) {
            const cplx hij = vdot(v[i], w);
            col[i] = hij;
            for (std::size_t t = 0; t < n; ++t) w[t] -= hij * v[i][t];
        }
        double after = vnorm(w);
        // measured loss of w against the basis decides the second pass
        std::vector<cplx> d(k + 1);
        double loss = 0.0;
        for (int i = 0; i <= k; ++i) {
            d[i] = vdot(v[i], w);
            loss = std::max(loss, std::abs(d[i]));
        }
        if (loss > kReorthThreshold * after) {
            ++rep.reorthogonalizations;
            for (int i = 0; i <= k; ++i) {
                col[i] += d[i];
                for (std::size_t t = 0; t < n; ++t) w[t] -= d[i] * v[i][t];
            }
            after = vnorm(w);
        }
        col[k + 1] = after;
        for (int i = 0; i < k; ++i) {
            const cplx a = col[i], b = col[i + 1];
            col[i] = cs[i] * a + sn[i] * b;
            col[i + 1] = -std::conj(sn[i]) * a + cs[i] * b;
        }
        double c;
        cplx s, r;
        givens(col[k], col[k + 1], c, s, r);
        col[k] = r;
        col[k + 1] = 0.0;
        cs.push_back(c);
        sn.push_back(s);
        g.push_back(-std::conj(s) * g[k]);
        g[k] = c * g[k];
        h.push_back(std::move(col));
        const double res = std::abs(g[k + 1]) / bnorm;
        rep.residual_history.push_back(res);
        const bool breakdown = after <= 1e-14 * before || after == 0.0;
        if (res <= tol || breakdown || k + 1 == m) {
            ++k;
            break;
        }
        v.emplace_back(w);
        for (auto& x : v.back()) x /= after;
    }
    // back substitution
    std::vector<cplx> y(k);
    for (int i = k - 1; i >= 0; --i) {
        cplx s = g[i];
        for (int j = i + 1; j < k; ++j) s -= h[j][i] * y[j];
        y[i] = s / h[i][i];
    }
    for (int j = 0; j < k; ++j)
        for (std::size_t t = 0; t < n; ++t) rep.solution[t] += y[j] * v[j][t];
    rep.iterations = k;
    apply(rep.solution, w);
    for (std::size_t t = 0; t < n; ++t) w[t] = rhs[t] - w[t];
    rep.true_residual = vnorm(w) / bnorm;
    rep.converged = rep.residual_history.back() <= tol;
    double loss = 0.0;
    const int nb = static_cast<int>(v.size());
    for (int i = 0; i < nb; ++i)
        for (int j = i; j < nb; ++j) {
            const cplx d = vdot(v[i], v[j]) - (i == j ? 1.0 : 0.0);
            loss = std::max(loss, std::abs(d));
        }
    rep.orthogonality_loss = loss;
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

std::vector<cplx> spectrum(const Eigen::MatrixXcd& matrix) {
    const Eigen::Index n = matrix.rows();
    if (n > kSpectrumMaxSize || matrix.cols() > kSpectrumMaxSize)
        throw ArgumentError("matrix exceeds the spectrum size guard of 8192");
    if (matrix.cols() != n) throw ArgumentError("spectrum needs a square matrix");
    if (n == 0) return {};
    Eigen::MatrixXcd a = matrix;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag()))
                throw ArgumentError("matrix has non-finite entries");

    // Householder reduction to upper Hessenberg form
    for (Eigen::Index k = 0; k + 2 <= n - 1; ++k) {
        const Eigen::Index len = n - k - 1;
        auto x = a.col(k).segment(k + 1, len);
        const double xn = x.norm();
        if (xn == 0.0) continue;
        const cplx x0 = x(0);
        const cplx phase = std::abs(x0) == 0.0 ? cplx(1.0) : x0 / std::abs(x0);
        Eigen::VectorXcd vh = x;
        vh(0) += phase * xn;
        const double vn = vh.norm();
        if (vn == 0.0) continue;
        vh /= vn;
        // A <- (I - 2 v v^H) A (I - 2 v v^H)
        auto rows = a.middleRows(k + 1, len);
        Eigen::RowVectorXcd t = vh.adjoint() * rows;
        rows.noalias() -= 2.0 * vh * t;
        auto cols = a.middleCols(k + 1, len);
        Eigen::VectorXcd t2 = cols * vh;
        cols.noalias() -= 2.0 * t2 * vh.adjoint();
        a.col(k).segment(k + 2, len - 1).setZero();
    }

    // Shifted QR on the active window, eigenvalues only
    std::vector<cplx> eig(n);
    const double eps = std::numeric_limits<double>::epsilon();
    const double anorm = a.norm();
    Eigen::Index hi = n - 1;
    int iter = 0, total = 0;
    std::vector<double> gc(n);
    std::vector<cplx> gs(n);
    while (hi >= 0) {
        if (hi == 0) {
            eig[0] = a(0, 0);
            break;
        }
        Eigen::Index l = hi;
        for (; l > 0; --l) {
            double scale = std::abs(a(l, l)) + std::abs(a(l - 1, l - 1));
            if (scale == 0.0) scale = anorm;
            if (std::abs(a(l, l - 1)) <= eps * scale) {
                a(l, l - 1) = 0.0;
                break;
            }
        }
        if (l == hi) {
            eig[hi] = a(hi, hi);
            --hi;
            iter = 0;
            continue;
        }
        if (++total > 60 * static_cast<int>(n)) throw DegenerateError("QR iteration failed to converge");
        ++iter;
        cplx mu;
        if (iter % 11 == 10) {
            mu = a(hi, hi) + std::abs(a(hi, hi - 1)) * cplx(0.75, 0.43);
        } else {
            const cplx p = a(hi - 1, hi - 1), q = a(hi - 1, hi), r = a(hi, hi - 1), s = a(hi, hi);
            const cplx half = 0.5 * (p - s);
            const cplx disc = std::sqrt(half * half + q * r);
            const cplx m1 = 0.5 * (p + s) + disc, m2 = 0.5 * (p + s) - disc;
            mu = std::abs(m1 - s) < std::abs(m2 - s) ? m1 : m2;
        }
        for (Eigen::Index k = l; k <= hi; ++k) a(k, k) -= mu;
        for (Eigen::Index k = l; k < hi; ++k) {
            double c;
            cplx sgv, r;
            givens(a(k, k), a(k + 1, k), c, sgv, r);
            gc[k] = c;
            gs[k] = sgv;
            for (Eigen::Index j = k; j <= hi; ++j) {
                const cplx x = a(k, j), y = a(k + 1, j);
                a(k, j) = c * x + sgv * y;
                a(k + 1, j) = -std::conj(sgv) * x + c * y;
            }
        }
        for (Eigen::Index k = l; k < hi; ++k) {
            const double c = gc[k];
            const cplx sgv = gs[k];
            const Eigen::Index top = std::min(k + 2, hi);
            for (Eigen::Index i = l; i <= top; ++i) {
                const cplx x = a(i, k), y = a(i, k + 1);
                a(i, k) = c * x + std::conj(sgv) * y;
                a(i, k + 1) = -sgv * x + c * y;
            }
        }
        for (Eigen::Index k = l; k <= hi; ++k) a(k, k) += mu;
    }
    return eig;
}

}  // namespace mibie::solver
