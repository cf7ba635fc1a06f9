#include "plap/scalar_field.hpp"

#include <cmath>
#include <stdexcept>

namespace plap {

Point field_gradient(const ScalarField& f, const Point& x, double fd_step) {
    if (f.gradient) return f.gradient(x);
    Point g(x.size());
    Point xp = x, xm = x;
    for (std::size_t k = 0; k < x.size(); ++k) {
        xp[k] = x[k] + fd_step;
        xm[k] = x[k] - fd_step;
        g[k] = (f.value(xp) - f.value(xm)) / (2.0 * fd_step);
        xp[k] = x[k];
        xm[k] = x[k];
    }
    return g;
}

std::vector<double> field_hessian(const ScalarField& f, const Point& x, double fd_step) {
    if (f.hessian) return f.hessian(x);
    const std::size_t d = x.size();
    std::vector<double> h(d * d);
    const double f0 = f.value(x);
    Point xa = x;
    for (std::size_t i = 0; i < d; ++i) {
        xa[i] = x[i] + fd_step;
        const double fp = f.value(xa);
        xa[i] = x[i] - fd_step;
        const double fm = f.value(xa);
        xa[i] = x[i];
        h[i * d + i] = (fp - 2.0 * f0 + fm) / (fd_step * fd_step);
        for (std::size_t j = i + 1; j < d; ++j) {
            xa[i] = x[i] + fd_step;
            xa[j] = x[j] + fd_step;
            const double fpp = f.value(xa);
            xa[j] = x[j] - fd_step;
            const double fpm = f.value(xa);
            xa[i] = x[i] - fd_step;
            const double fmm = f.value(xa);
            xa[j] = x[j] + fd_step;
            const double fmp = f.value(xa);
            xa[i] = x[i];
            xa[j] = x[j];
            const double v = (fpp - fpm - fmp + fmm) / (4.0 * fd_step * fd_step);
            h[i * d + j] = v;
            h[j * d + i] = v;
        }
    }
    return h;
}

ScalarField linear_field(Point c) {
    ScalarField f;
    f.dim = static_cast<int>(c.size());
    f.value = [c](const Point& x) {
        double s = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * x[k];
        return s;
    };
    f.gradient = [c](const Point&) { return c; };
    f.hessian = [d = c.size()](const Point&) { return std::vector<double>(d * d, 0.0); };
    return f;
}

ScalarField norm_field(int dim, Point center) {
    if (center.empty()) center.assign(dim, 0.0);
    if (static_cast<int>(center.size()) != dim)
        throw std::invalid_argument("norm_field: center dimension mismatch");
    auto radial = [center](const Point& x) {
        double s = 0.0;
        for (std::size_t k = 0; k < center.size(); ++k) {
            const double d = x[k] - center[k];
            s += d * d;
        }
        return std::sqrt(s);
    };
    ScalarField f;
    f.dim = dim;
    f.value = radial;
    f.gradient = [radial, center](const Point& x) {
        const double r = radial(x);
        Point g(center.size(), 0.0);
        if (r == 0.0) return g;
        for (std::size_t k = 0; k < center.size(); ++k) g[k] = (x[k] - center[k]) / r;
        return g;
    };
    f.hessian = [radial, center](const Point& x) {
        const std::size_t d = center.size();
        std::vector<double> h(d * d, 0.0);
        const double r = radial(x);
        if (r == 0.0) return h;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                const double xi = x[i] - center[i], xj = x[j] - center[j];
                h[i * d + j] = (i == j ? 1.0 / r : 0.0) - xi * xj / (r * r * r);
            }
        return h;
    };
    return f;
}

ScalarField squared_norm_field(int dim) {
    ScalarField f;
    f.dim = dim;
    f.value = [](const Point& x) {
        double s = 0.0;
        for (double v : x) s += v * v;
        return s;
    };
    f.gradient = [](const Point& x) {
        Point g(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) g[k] = 2.0 * x[k];
        return g;
    };
    f.hessian = [](const Point& x) {
        const std::size_t d = x.size();
        std::vector<double> h(d * d, 0.0);
        for (std::size_t i = 0; i < d; ++i) h[i * d + i] = 2.0;
        return h;
    };
    return f;
}

ScalarField field_1d(std::function<double(double)> fn) {
    ScalarField f;
    f.dim = 1;
    f.value = [fn = std::move(fn)](const Point& x) { return fn(x[0]); };
    return f;
}

}  // namespace plap
