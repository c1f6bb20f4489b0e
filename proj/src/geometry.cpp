#include "mibie/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace mibie::geometry {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

double wrap(double t) {
    t = std::fmod(t, kTwoPi);
    return t < 0.0 ? t + kTwoPi : t;
}

struct Sampler {
    double t;
    CurveSample operator()(const Circle& c) const {
        const double ct = std::cos(t), st = std::sin(t), r = c.radius;
        return {{c.center.x + r * ct, c.center.y + r * st}, {-r * st, r * ct}, {-r * ct, -r * st}};
    }
    CurveSample operator()(const Ellipse& e) const {
        const double ct = std::cos(t), st = std::sin(t);
        return {{e.center.x + e.a * ct, e.center.y + e.b * st}, {-e.a * st, e.b * ct}, {-e.a * ct, -e.b * st}};
    }
    CurveSample operator()(const Fourier& f) const {
        double r = f.r0, dr = 0.0, ddr = 0.0;
        for (std::size_t k = 0; k < f.cos_coeffs.size(); ++k) {
            const double m = k + 1.0, c = std::cos(m * t), s = std::sin(m * t), a = f.cos_coeffs[k];
            r += a * c;
            dr -= a * m * s;
            ddr -= a * m * m * c;
        }
        for (std::size_t k = 0; k < f.sin_coeffs.size(); ++k) {
            const double m = k + 1.0, c = std::cos(m * t), s = std::sin(m * t), b = f.sin_coeffs[k];
            r += b * s;
            dr += b * m * c;
            ddr -= b * m * m * s;
        }
        const double ct = std::cos(t), st = std::sin(t);
        return {{f.center.x + r * ct, f.center.y + r * st},
                {dr * ct - r * st, dr * st + r * ct},
                {ddr * ct - 2.0 * dr * st - r * ct, ddr * st + 2.0 * dr * ct - r * st}};
    }
};

GaussLegendre make_gauss_legendre(int n) {
    GaussLegendre g;
    g.x.resize(n);
    g.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        g.x[n - 1 - i] = x;
        g.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    g.bary.resize(n);
    for (int j = 0; j < n; ++j) {
        double prod = 1.0;
        for (int k = 0; k < n; ++k)
            if (k != j) prod *= (g.x[j] - g.x[k]);
        g.bary[j] = 1.0 / prod;
    }
    const double scale = *std::max_element(g.bary.begin(), g.bary.end(),
                                           [](double a, double b) { return std::abs(a) < std::abs(b); });
    for (auto& b : g.bary) b /= std::abs(scale);
    return g;
}

}  // namespace

Circle reference_circle() { return {{5.25, 5.25}, 3.5}; }

Fourier apple_shape() { return {{5.25, 5.25}, 3.0, {0.0, 0.0, 0.0, 0.0, 0.45}, {}}; }

CurveSample sample(const Shape& shape, double t) { return std::visit(Sampler{t}, shape); }

Point2 outward_normal(const CurveSample& s) {
    const double l = norm(s.dx);
    return {s.dx.y / l, -s.dx.x / l};
}

void validate(const CurveSpec& spec) {
    if (spec.n_panels < 4) throw ArgumentError("n_panels must be at least 4");
    if (spec.nodes_per_panel < 2 || spec.nodes_per_panel > 64)
        throw ArgumentError("nodes_per_panel must lie in [2, 64]");
    if (const auto* c = std::get_if<Circle>(&spec.shape)) {
        if (!(c->radius > 0.0)) throw ArgumentError("circle radius must be positive");
    } else if (const auto* e = std::get_if<Ellipse>(&spec.shape)) {
        if (!(e->a > 0.0) || !(e->b > 0.0)) throw ArgumentError("ellipse semi-axes must be positive");
    } else {
        const auto& f = std::get<Fourier>(spec.shape);
        const Fourier centred{{0.0, 0.0}, f.r0, f.cos_coeffs, f.sin_coeffs};
        for (int i = 0; i < 4096; ++i) {
            const CurveSample s = sample(centred, kTwoPi * i / 4096.0);
            if (!(norm(s.x) > 0.0) || dot(s.x, {std::cos(kTwoPi * i / 4096.0), std::sin(kTwoPi * i / 4096.0)}) <= 0.0)
                throw ArgumentError("fourier radius function must be strictly positive");
        }
    }
}

const GaussLegendre& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GaussLegendre>> cache;
    if (n < 1 || n > 256) throw ArgumentError("Gauss-Legendre order out of range");
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<GaussLegendre>(make_gauss_legendre(n));
    return *slot;
}

void lagrange_weights(const GaussLegendre& rule, double s, double* out) {
    const int n = static_cast<int>(rule.x.size());
    double den = 0.0;
    for (int j = 0; j < n; ++j) {
        const double d = s - rule.x[j];
        if (d == 0.0) {
            for (int k = 0; k < n; ++k) out[k] = (k == j) ? 1.0 : 0.0;
            return;
        }
        out[j] = rule.bary[j] / d;
        den += out[j];
    }
    for (int j = 0; j < n; ++j) out[j] /= den;
}

PanelizedCurve::PanelizedCurve(Shape shape, std::vector<double> breakpoints, int q)
    : shape_(std::move(shape)), breaks_(std::move(breakpoints)), q_(q) {
    const GaussLegendre& gl = gauss_legendre(q_);
    const int m = static_cast<int>(breaks_.size()) - 1;
    panels_.resize(m);
    x_.reserve(m * q_);
    for (int p = 0; p < m; ++p) {
        const double t0 = breaks_[p], t1 = breaks_[p + 1], half = 0.5 * (t1 - t0);
        double len = 0.0;
        for (int i = 0; i < q_; ++i) {
            const double t = t0 + half * (gl.x[i] + 1.0);
            const CurveSample s = sample(shape_, t);
            const double w = gl.w[i] * half * norm(s.dx);
            x_.push_back(s.x);
            n_.push_back(outward_normal(s));
            w_.push_back(w);
            t_.push_back(t);
            len += w;
        }
        panels_[p] = {t0, t1, len};
    }
    // orientation check: enclosed area must be positive
    double area = 0.0;
    for (int i = 0; i < size(); ++i) area += 0.5 * w_[i] * dot(x_[i], n_[i]);
    if (!(area > 0.0)) throw GeometryError("curve is not positively oriented");
    const int stride = std::max(1, size() / 1000);
    for (int i = 0; i < size(); i += stride)
        for (int j = i + stride; j < size(); j += stride) diameter_ = std::max(diameter_, norm(x_[i] - x_[j]));
}

double PanelizedCurve::total_length() const {
    double s = 0.0;
    for (const auto& p : panels_) s += p.length;
    return s;
}

double PanelizedCurve::max_panel_length() const {
    double h = 0.0;
    for (const auto& p : panels_) h = std::max(h, p.length);
    return h;
}

int PanelizedCurve::panel_at(double t) const {
    t = wrap(t);
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
    int p = static_cast<int>(it - breaks_.begin()) - 1;
    return std::clamp(p, 0, n_panels() - 1);
}

ClosestPoint PanelizedCurve::closest_point(Point2 x) const {
    int best = 0;
    double bd = INFINITY;
    for (int i = 0; i < size(); ++i) {
        const double d = norm(x_[i] - x);
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    // Newton on (gamma(t) - x) . gamma'(t) = 0, step limited to a panel width
    double t = t_[best];
    const Panel& pn = panels_[panel_of(best)];
    const double max_step = pn.t1 - pn.t0;
    CurveSample s = sample(shape_, t);
    for (int it = 0; it < 30; ++it) {
        const Point2 d = s.x - x;
        const double f = dot(d, s.dx);
        const double df = dot(s.dx, s.dx) + dot(d, s.ddx);
        double step = df > 0.0 ? -f / df : -f / dot(s.dx, s.dx);
        step = std::clamp(step, -max_step, max_step);
        const CurveSample trial = sample(shape_, t + step);
        if (norm(trial.x - x) > norm(s.x - x) + 1e-15 * (1.0 + norm(x))) break;
        t += step;
        s = trial;
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(t))) break;
    }
    ClosestPoint cp;
    cp.t = wrap(t);
    cp.foot = s.x;
    cp.normal = outward_normal(s);
    const double dist = norm(x - s.x);
    cp.signed_distance = dot(x - s.x, cp.normal) >= 0.0 ? dist : -dist;
    cp.panel = panel_at(cp.t);
    return cp;
}

PanelizedCurve build_curve(const CurveSpec& spec) {
    validate(spec);
    std::vector<double> br(spec.n_panels + 1);
    for (int p = 0; p <= spec.n_panels; ++p) br[p] = kTwoPi * p / spec.n_panels;
    return PanelizedCurve(spec.shape, std::move(br), spec.nodes_per_panel);
}

PanelizedCurve refine(const PanelizedCurve& curve, int factor) {
    if (factor < 2) throw ArgumentError("refinement factor must be at least 2");
    const auto& b = curve.breakpoints();
    std::vector<double> br;
    br.reserve((b.size() - 1) * factor + 1);
    for (std::size_t p = 0; p + 1 < b.size(); ++p)
        for (int k = 0; k < factor; ++k) br.push_back(b[p] + (b[p + 1] - b[p]) * k / factor);
    br.push_back(b.back());
    return PanelizedCurve(curve.shape(), std::move(br), curve.nodes_per_panel());
}

}  // namespace mibie::geometry
