#pragma once

#include <utility>
#include <vector>

#include "plap/density.hpp"
#include "plap/graph.hpp"
#include "plap/quadrature.hpp"
#include "plap/scalar_field.hpp"

namespace plap {

/// Sentinel for "p = infinity" where an operation admits it.
inline constexpr int kPInfinity = -1;

/// Surface area of the unit sphere in R^d.
double sphere_area(int d);
/// Volume of the unit ball in R^d.
double ball_volume(int d);

/// C_p = d^{-p/2} * integral of |z|^p phi(|z|)^p over R^d, reduced to the
/// radial integral d^{-p/2} w_{d-1} int r^{p+d-1} phi(r)^p dr.
double c_p(const EdgeKernel& kernel, int p, int d);

/// Integral factor int |grad f|^p mu^2 dx (callers multiply by c_p).
QuadResult i_p(const ScalarField& f, const DensityModel& density, int p,
               const QuadratureSpec& quad);

/// Design-decision default quadrature for a given dimension: adaptive in 1D,
/// tensor Gauss in 2D, Monte Carlo above.
QuadratureSpec default_quadrature(int d, std::uint64_t seed = 0);

/// Solution of the 1D Euler-Lagrange equation between consecutive labels:
/// f' proportional to mu^{-2/(p-1)} on each interval (linear interpolation at
/// p = infinity), constant extension outside the labeled hull.
ScalarField closed_form_1d(const DensityModel& density,
                           const std::vector<std::pair<double, double>>& labels, int p);

/// Residual of Delta_2 f + 2 <grad log mu, grad f> + (p-2) Delta_inf f at x.
double el_residual(const ScalarField& f, const DensityModel& density, int p, const Point& x,
                   double fd_step);

/// <grad f, hess f grad f> / <grad f, grad f>, defined as 0 at grad f = 0.
double infinity_laplacian(const ScalarField& f, const Point& x, double fd_step);

struct SpikeResult {
    double value = 0.0;       ///< numeric integral of |grad f_eps|^p mu^2
    double paper_bound = 0.0; ///< closed-form upper bound for the family
};

/// Degenerate families: for p <= d-1 the cone spike min(|x-anchor|/eps, 1);
/// for p = d the log profile log((r^2+eps)/eps)/log((1+eps)/eps). The spike
/// is anchored at the centroid of the density's support. Rejects p > d.
SpikeResult spike_family(int p, int d, double epsilon, const DensityModel& density,
                         const QuadratureSpec& quad);

/// Energy of the cone-spike family under an arbitrary exponent; used to
/// contrast the non-degenerate regime q = d+1.
double spike_energy(int exponent, int d, double epsilon, const DensityModel& density,
                    const QuadratureSpec& quad);

struct TensorCheckResult {
    double lhs = 0.0;        ///< Monte Carlo estimate of int w(|z|) <u,z>^p dz
    double rhs = 0.0;        ///< d^{-p/2} (int w(|z|) |z|^p dz) |u|^p, or 0 for odd p
    double mc_stderr = 0.0;
};

/// Isotropy identity for rank-one tensor contractions against radial weights.
TensorCheckResult tensor_contraction_check(const std::function<double(double)>& w,
                                           double support_radius, int p, int d, const Point& u,
                                           std::size_t mc_samples, std::uint64_t seed);

}  // namespace plap
