#pragma once

#include <functional>
#include <vector>

#include "plap/density.hpp"

namespace plap {

/// Evaluable function R^d -> R with optional analytic derivatives; central
/// differences are used where a derivative closure is absent.
struct ScalarField {
    int dim = 1;
    std::function<double(const Point&)> value;
    std::function<Point(const Point&)> gradient;                 // optional
    std::function<std::vector<double>(const Point&)> hessian;    // optional, row-major d x d
};

Point field_gradient(const ScalarField& f, const Point& x, double fd_step);
std::vector<double> field_hessian(const ScalarField& f, const Point& x, double fd_step);

/// f(x) = <c, x>, analytic derivatives.
ScalarField linear_field(Point c);
/// f(x) = |x - center|_2, analytic derivatives away from the center.
ScalarField norm_field(int dim, Point center = {});
/// f(x) = |x|_2^2, analytic derivatives.
ScalarField squared_norm_field(int dim);
/// 1D field from an arbitrary callable (derivatives by differences).
ScalarField field_1d(std::function<double(double)> fn);

}  // namespace plap
