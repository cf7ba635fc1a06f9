#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace plap {

using Point = std::vector<double>;

/// Uniform density on a d-dimensional box; value 1/volume inside, 0 outside.
struct UniformBox {
    Point lo, hi;
};

/// Piecewise-constant density on the interval [breakpoints.front(), breakpoints.back()].
/// values[i] is the (strictly positive) density on (breakpoints[i], breakpoints[i+1]).
struct PiecewiseConstant1D {
    std::vector<double> breakpoints;
    std::vector<double> values;
};

/// Mixture of isotropic Gaussians on R^d.
struct GaussianMixture {
    std::vector<Point> means;
    std::vector<double> stddevs;
    std::vector<double> weights;
};

using DensityModel = std::variant<UniformBox, PiecewiseConstant1D, GaussianMixture>;

UniformBox make_uniform(Point lo, Point hi);
PiecewiseConstant1D make_piecewise_constant(std::vector<double> breakpoints,
                                            std::vector<double> values);
GaussianMixture make_gaussian_mixture(std::vector<Point> means, std::vector<double> stddevs,
                                      std::vector<double> weights);

int dimension(const DensityModel& model);

/// Density value mu(x); zero outside the support of boxed variants.
double eval_density(const DensityModel& model, const Point& x);

/// Analytic gradient of log mu. Zero for uniform and piecewise-constant
/// interiors; evaluation at a breakpoint or a zero-density point throws.
Point grad_log_density(const DensityModel& model, const Point& x);

/// n i.i.d. draws, deterministic given the seed. Inverse CDF for the 1D
/// piecewise model, per-axis uniforms for boxes, component pick plus
/// standard-normal transform for mixtures.
std::vector<Point> sample(const DensityModel& model, std::size_t n, std::uint64_t seed);

/// Supremum of the density (exact for boxed variants, a tight upper bound
/// sum of component peaks for mixtures).
double density_sup(const DensityModel& model);

/// Bounding box of the support; mixtures report means +/- 8 stddev.
void support_box(const DensityModel& model, Point& lo, Point& hi);

/// Piecewise-linear function with constant extension outside the hull.
struct TargetFunction {
    std::vector<double> breakpoints;  ///< ascending
    std::vector<double> values;       ///< same length

    double operator()(double x) const;
    double lipschitz_constant() const;
};

/// The Section-5 construction: density b on [-eps,eps] and a outside, with
/// b = sqrt(eps) and (1-eps) a + eps b = 1/2, paired with the ramp target
/// f*(x) = clamp(x/eps, -1, 1) on [-1,1].
struct ClusterInstance {
    DensityModel density;
    TargetFunction target;
    double epsilon = 0.0;
    double a = 0.0;
    double b = 0.0;
};

ClusterInstance make_cluster_instance(double epsilon);

/// JSON round trip; field names are fixed in docs/density_schema.md.
std::string density_to_json(const DensityModel& model);
DensityModel density_from_json(const std::string& text);

}  // namespace plap
