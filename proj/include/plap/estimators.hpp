#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <variant>
#include <vector>

#include "plap/density.hpp"

namespace plap {

/// Noisy observations y_i = f*(x_i) + sigma xi_i at design points drawn from
/// the cluster density; xs are sorted ascending.
struct RegressionSample {
    std::vector<double> xs;
    std::vector<double> ys;
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

RegressionSample make_regression_sample(const ClusterInstance& inst, std::size_t n, double sigma,
                                        std::uint64_t seed);

/// Kernel ridge fit: alpha solves (G + n lambda I) alpha = y, prediction
/// f(x) = sum_i alpha_i K(x, x_i).
struct RkhsModel {
    DensityModel density;
    std::vector<double> xs;
    std::vector<double> alpha;
    double lambda = 0.0;
    double h_seminorm = 0.0;  ///< alpha^T G alpha
    double profile_total = 0.0;
    std::vector<double> profile;  ///< F(x_i), kernel cumulative coordinates
};

/// Fitted values at the sorted design points under |f_{i+1} - f_i| <=
/// L (x_{i+1} - x_i); prediction is piecewise-linear with constant extension.
struct LipschitzModel {
    std::vector<double> xs;
    std::vector<double> fitted;
    double L = 0.0;
};

using FittedModel = std::variant<RkhsModel, LipschitzModel>;

double evaluate(const FittedModel& model, double x);
/// Odd part (f(x) - f(-x)) / 2, the optional symmetrization post-step.
double evaluate_odd_part(const FittedModel& model, double x);

FittedModel fit_rkhs(const RegressionSample& sample, double lambda, const DensityModel& density);

FittedModel fit_lipschitz(const RegressionSample& sample, double L);

/// One projected-gradient step from the given fitted values (used by the
/// optimality fixed-point check); returns the moved values.
std::vector<double> lipschitz_pg_step(const RegressionSample& sample, double L,
                                      const std::vector<double>& fitted);

struct CvResult {
    double best_param = 0.0;
    std::vector<std::pair<double, double>> curve;  ///< (param, mean CV MSE)
};

/// k-fold CV over the grid; folds are a seeded permutation of indices taken
/// round-robin. Ties prefer the later grid entry, so order grids from least
/// to most regularized.
CvResult cross_validate(const std::function<FittedModel(const RegressionSample&, double)>& fitter,
                        const RegressionSample& sample, const std::vector<double>& grid, int folds,
                        std::uint64_t seed);

/// Empirical squared error (1/n) sum (f(x_i) - f*(x_i))^2.
double empirical_error(const FittedModel& model, const TargetFunction& target,
                       const std::vector<double>& xs);

}  // namespace plap
