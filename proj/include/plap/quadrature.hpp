#pragma once

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

namespace plap {

/// Result of a numeric integral together with an error estimate.
struct QuadResult {
    double value = 0.0;
    double error = 0.0;  ///< absolute error estimate (std. error for Monte Carlo)
};

/// Adaptive 1D quadrature to an absolute tolerance.
struct AdaptiveQuad {
    double abs_tol = 1e-10;
    int max_depth = 48;
};

/// Fixed tensor-product Gauss-Legendre grid.
struct TensorGridQuad {
    int points_per_axis = 64;
};

/// Plain Monte Carlo over a box or against a sampler.
struct MonteCarloQuad {
    std::size_t samples = 100000;
    std::uint64_t seed = 0;
};

using QuadratureSpec = std::variant<AdaptiveQuad, TensorGridQuad, MonteCarloQuad>;

/// Adaptive Simpson on [a,b].
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double abs_tol = 1e-10, int max_depth = 48);

/// Gauss-Legendre nodes/weights on [-1,1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Tensor-product Gauss-Legendre over the box [lo,hi]^d.
QuadResult integrate_tensor(const std::function<double(const std::vector<double>&)>& f,
                            const std::vector<double>& lo, const std::vector<double>& hi,
                            int points_per_axis);

/// Monte Carlo over the box [lo,hi]^d; error = standard error of the mean x volume.
QuadResult integrate_monte_carlo(const std::function<double(const std::vector<double>&)>& f,
                                 const std::vector<double>& lo, const std::vector<double>& hi,
                                 std::size_t samples, std::uint64_t seed);

}  // namespace plap
