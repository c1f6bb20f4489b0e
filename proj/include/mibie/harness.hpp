#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mibie/formulations.hpp"
#include "mibie/geometry.hpp"
#include "mibie/kernels.hpp"
#include "mibie/params.hpp"
#include "mibie/types.hpp"

namespace mibie::harness {

using formulations::FieldValues;
using formulations::Method;

struct Source {
    Point2 position{};
    cplx strength{1.0};
};

// Which Green's function terms the manufactured field keeps.
enum class Content { Full, AcousticOnly, ThermalOnly };

struct FieldPair {
    cplx t, p;
};

// Sum of free-space Green's fields of interior point sources.
class ManufacturedProblem {
public:
    ManufacturedProblem(std::vector<Source> sources, const ModeConstants& modes, const GasParams& params,
                        const geometry::PanelizedCurve& curve, Content content = Content::Full);

    const std::vector<Source>& sources() const { return sources_; }
    FieldPair exact(Point2 x) const;
    FieldPair exact_normal_derivative(Point2 x, Point2 n) const;
    FieldValues exact(std::span<const Point2> points) const;
    formulations::NeumannData neumann(const geometry::PanelizedCurve& curve) const;

private:
    std::vector<Source> sources_;
    ModeConstants modes_;
    cplx b_acoustic_, b_thermal_;
};

// Three sources at half the radius, angles 0, 2 pi / 3, 4 pi / 3, strengths 1, 0.5i, -0.25.
std::vector<Source> default_sources(const geometry::Circle& circle);

struct ErrorPair {
    double err_t = 0.0;
    double err_p = 0.0;
};

// Sup of pointwise relative errors, skipping points where the reference is
// below guard times its maximum magnitude.
ErrorPair error_norms(const FieldValues& computed, const FieldValues& exact, double guard = 1e-6);

enum class Sweep { P, H };
const char* sweep_name(Sweep s);
Sweep parse_sweep(std::string_view name);

struct ExperimentConfig {
    GasParams params = reference_params();
    geometry::Shape shape = geometry::reference_circle();
    int n_panels = 100;
    int nodes_per_panel = 0;  // 0: p + 1
    std::vector<int> p_values{2, 4, 6, 8, 10, 12};
    int h_order = 4;
    std::vector<int> h_panels{100, 200, 400, 800};
    int qbx_order = -1;  // -1: p in the p-sweep, p + 4 in the h-sweep
    int upsample = 4;
    double radius_factor = 0.5;
    double kr_cap = 0.5;
    std::vector<Method> methods{Method::Coupled, Method::CoupledPreconditioned, Method::Decoupled,
                                Method::Projection};
    double tol = 1e-14;
    int max_iter = 500;
    double guard = 1e-6;
    std::vector<Source> sources;  // empty: default_sources of the circle (or of a radius-1.5 disc)
    // projection sweep
    int proj_panels = 400;
    int proj_nodes = 8;
    double proj_source_depth = 0.1;
    std::vector<double> proj_distances{0.001, 0.002, 0.005, 0.01, 0.02, 0.035, 0.05, 0.075, 0.1};
    int proj_points = 720;
    // spectrum
    int spec_panels = 100;
    int spec_nodes = 4;
    int spec_qbx_order = 16;
    double cluster_radius = 0.1;
    // field grid
    int grid_n = 50;
    double grid_min = 0.0;
    double grid_max = 10.5;
    double grid_exclusion = 0.05;
    Method grid_method = Method::CoupledPreconditioned;
};

void validate(const ExperimentConfig& cfg);

quadrature::QbxConfig qbx_config(const ExperimentConfig& cfg, int order);

std::vector<Source> resolve_sources(const ExperimentConfig& cfg);

struct ErrorRecord {
    Sweep sweep = Sweep::P;
    Method method = Method::Coupled;
    int p = 0;
    int qbx_order = 0;
    int n_panels = 0;
    int nodes_per_panel = 0;
    int n_nodes = 0;
    double h = 0.0;  // max panel arc length
    double err_t = 0.0;
    double err_p = 0.0;
    int iterations = 0;
    bool converged = false;
    double wall_time = 0.0;
    std::string error;  // solver failure message, empty on success
};

using Progress = std::function<void(const ErrorRecord&)>;

std::vector<ErrorRecord> run_convergence(const ExperimentConfig& cfg, Sweep sweep, const Progress& progress = {});

// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

// Slope of log(err_t), or log(err_p), against log(h) for one method of an h-sweep.
double fitted_order(const std::vector<ErrorRecord>& records, Method method, bool pressure = false);

struct DecayPoint {
    double distance = 0.0;
    double err_t = 0.0;  // sup |T_h - T| / sup |T| on the offset curve
    double err_p = 0.0;
};

struct ProjectionSweep {
    std::vector<DecayPoint> points;
    double slope_t = 0.0;  // d log(err_t) / d distance over distances <= fit_max
    double fit_max = 0.1;
    double im_k_t = 0.0;
    int iterations = 0;
};

// Offsets curve points x(t) + d n(t) at n uniform parameter values starting at t = 0.
std::vector<Point2> offset_curve(const geometry::Shape& shape, double distance, int n);

ProjectionSweep run_projection_sweep(const ExperimentConfig& cfg, Content content = Content::Full);

struct ClusterStats {
    std::vector<cplx> centers;    // greedy centers, best first
    std::vector<double> coverage;  // cumulative fraction covered by the first i+1 centers
    int centers_for(double fraction) const;
};

// Greedy cover by discs of the given radius centred at eigenvalues.
ClusterStats cluster_coverage(std::span<const cplx> values, double radius, int max_centers = 4);

struct SpectrumResult {
    int dimension = 0;
    std::vector<cplx> unpreconditioned, preconditioned;
    ClusterStats unpreconditioned_stats, preconditioned_stats;
};

SpectrumResult run_spectrum(const ExperimentConfig& cfg);

struct GridResult {
    std::vector<Point2> points;
    FieldValues computed, exact;
    ErrorPair errors;
    int iterations = 0;
};

// Uniform grid on the box minus D and a band of width grid_exclusion around the curve.
std::vector<Point2> volume_grid(const ExperimentConfig& cfg, const geometry::PanelizedCurve& curve);

GridResult run_solve(const ExperimentConfig& cfg);

// CSV: '#' comment lines, one header line, rows.
using Metadata = std::vector<std::pair<std::string, std::string>>;
void write_csv(std::ostream& os, const Metadata& meta, const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows);

std::string format_number(double x);

void write_convergence_csv(std::ostream& os, const ExperimentConfig& cfg, const std::vector<ErrorRecord>& records);
void write_projection_csv(std::ostream& os, const ExperimentConfig& cfg, const ProjectionSweep& sweep);
void write_spectrum_csv(std::ostream& os, const ExperimentConfig& cfg, const SpectrumResult& spec);
void write_grid_csv(std::ostream& os, const ExperimentConfig& cfg, const GridResult& grid);

}  // namespace mibie::harness
