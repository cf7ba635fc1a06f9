#pragma once

#include <cstdint>
#include <vector>

#include "plap/density.hpp"

namespace plap {

/// The weighted-Sobolev reproducing kernel on [-1,1]:
/// K(x,y) = (1/4) int_{-1}^{1} dt/mu^2(t) - (1/2) | int_x^y dt/mu^2(t) |.
/// Piecewise-constant densities are integrated analytically, anything else
/// by adaptive quadrature.
double kernel_k(const DensityModel& density, double x, double y);

/// Cumulative coordinate F(x) = int_{-1}^{x} dt/mu^2(t) for a batch of
/// points, plus F(1) in `total`; K(x,y) = total/4 - |F(y) - F(x)|/2.
std::vector<double> kernel_k_profile(const DensityModel& density, const std::vector<double>& xs,
                                     double& total);

/// Eigenvalues of the cluster-density kernel, enumerated from the
/// transcendental equation tan(eps x/sqrt(b)) tan((1-eps) x/sqrt(a)) =
/// (b/a)^{3/2} in x = 1/sqrt(lambda).
///
/// Roots are bracketed one per positive branch of the fast tangent factor
/// (every second interval I_k of width (sqrt(a)/(1-eps)) pi/2; the k-th root
/// lies in I_{2k}) and refined by bisection away from the tangent poles. The
/// enumerated gamma_{k,j} double sequence mirrors the half-period roots and
/// shifts them by whole periods.
struct Spectrum {
    double epsilon = 0.0;
    double a = 0.0;
    double b = 0.0;
    double period = 0.0;        ///< (sqrt(b)/eps) * pi
    double period_ratio = 0.0;  ///< (1-eps)/sqrt(a) divided by eps/sqrt(b)
    bool ratio_is_integral = false;  ///< |ratio - round(ratio)| <= 1e-3
    std::size_t k0 = 0;         ///< number of roots in [0, period/2)
    std::vector<double> roots;  ///< x_k ascending, k in [0, k0)
    int j_max = 0;

    /// gamma_{k,j} for k in [0, 2 k0), j >= 0.
    double gamma(std::size_t k, int j) const;
    /// All enumerated eigenvalues, j in [0, j_max].
    std::vector<double> all_gammas() const;
};

Spectrum eigenvalues(double epsilon, int j_max);

/// Closed-form upper bound on gamma_{k,j}: 1.26 at k = j = 0, otherwise
/// 1 / ((k/(2 sqrt 2) + j eps^{-3/4})^2 pi^2).
double eigen_bound(double epsilon, std::size_t k, int j);

/// Bound sequence truncated where it drops below `trunc`.
std::vector<double> lemma3_bound_sequence(double epsilon, double trunc = 1e-14);

/// Smallest delta in [1e-8, 10] with
/// sqrt((2/n) sum min(gamma, delta^2)) <= (R/sigma) delta^2, by bisection.
double critical_radius(const std::vector<double>& gammas, double n, double sigma, double R);

struct RateReport {
    double n = 0.0;
    double sigma = 0.0;
    double epsilon = 0.0;
    double delta_n = 0.0;    ///< critical radius from the Lemma 3 bounds, R = 2
    double l2_rate = 0.0;    ///< (sigma^2 / n)^{2/3}
    double linf_rate = 0.0;  ///< (sigma^2 / (eps n))^{2/3}
};

RateReport rate_bounds(double n, double sigma, double epsilon);

}  // namespace plap
