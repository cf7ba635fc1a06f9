#include "plap/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "plap/rng.hpp"

namespace plap {

namespace {

constexpr double kPi = 3.14159265358979323846;

double grad_norm(const ScalarField& f, const Point& x, double step) {
    const Point g = field_gradient(f, x, step);
    double s = 0.0;
    for (double v : g) s += v * v;
    return std::sqrt(s);
}

double domain_scale(const DensityModel& density) {
    Point lo, hi;
    support_box(density, lo, hi);
    double diam2 = 0.0;
    for (std::size_t k = 0; k < lo.size(); ++k) diam2 += (hi[k] - lo[k]) * (hi[k] - lo[k]);
    return std::sqrt(diam2);
}

}  // namespace

double sphere_area(int d) {
    if (d < 1) throw std::invalid_argument("sphere_area: d must be >= 1");
    return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
}

double ball_volume(int d) { return sphere_area(d) / static_cast<double>(d); }

double c_p(const EdgeKernel& kernel, int p, int d) {
    if (p < 2 || p % 2 != 0) throw std::invalid_argument("c_p: p must be an even integer >= 2");
    if (d < 1) throw std::invalid_argument("c_p: d must be >= 1");
    const double radius = kernel.support_radius();
    const auto integrand = [&](double r) {
        return std::pow(r, p + d - 1) * std::pow(kernel(r), p);
    };
    const QuadResult q = integrate_adaptive(integrand, 0.0, radius, 1e-10);
    return std::pow(static_cast<double>(d), -0.5 * p) * sphere_area(d) * q.value;
}

QuadratureSpec default_quadrature(int d, std::uint64_t seed) {
    if (d == 1) return AdaptiveQuad{1e-8, 48};
    if (d == 2) return TensorGridQuad{128};
    return MonteCarloQuad{400000, seed};
}

QuadResult i_p(const ScalarField& f, const DensityModel& density, int p,
               const QuadratureSpec& quad) {
    if (p < 1) throw std::invalid_argument("i_p: p must be positive");
    const int d = dimension(density);
    if (f.dim != d) throw std::invalid_argument("i_p: field/density dimension mismatch");
    const double step = 1e-5 * std::max(domain_scale(density), 1e-8);

    if (std::holds_alternative<AdaptiveQuad>(quad)) {
        if (d != 1)
            throw std::invalid_argument("i_p: adaptive quadrature is 1D only; use tensor or MC");
        const auto& aq = std::get<AdaptiveQuad>(quad);
        Point lo, hi;
        support_box(density, lo, hi);
        const auto integrand = [&](double t) {
            const Point x{t};
            const double mu = eval_density(density, x);
            if (mu <= 0.0) return 0.0;
            return std::pow(grad_norm(f, x, step), p) * mu * mu;
        };
        return integrate_adaptive(integrand, lo[0], hi[0], aq.abs_tol, aq.max_depth);
    }
    if (std::holds_alternative<TensorGridQuad>(quad)) {
        const auto& tq = std::get<TensorGridQuad>(quad);
        Point lo, hi;
        support_box(density, lo, hi);
        const auto integrand = [&](const Point& x) {
            const double mu = eval_density(density, x);
            if (mu <= 0.0) return 0.0;
            return std::pow(grad_norm(f, x, step), p) * mu * mu;
        };
        return integrate_tensor(integrand, lo, hi, tq.points_per_axis);
    }
    // Monte Carlo against mu itself: int |grad f|^p mu^2 = E_{x~mu}[|grad f|^p mu(x)]
    const auto& mq = std::get<MonteCarloQuad>(quad);
    const std::vector<Point> xs = sample(density, mq.samples, mq.seed);
    double mean = 0.0, m2 = 0.0;
    std::size_t cnt = 0;
    for (const Point& x : xs) {
        const double v = std::pow(grad_norm(f, x, step), p) * eval_density(density, x);
        ++cnt;
        const double delta = v - mean;
        mean += delta / static_cast<double>(cnt);
        m2 += delta * (v - mean);
    }
    const double var = cnt > 1 ? m2 / static_cast<double>(cnt - 1) : 0.0;
    return {mean, std::sqrt(var / static_cast<double>(cnt))};
}

ScalarField closed_form_1d(const DensityModel& density,
                           const std::vector<std::pair<double, double>>& labels, int p) {
    if (dimension(density) != 1) throw std::invalid_argument("closed_form_1d: density must be 1D");
    if (labels.size() < 2) throw std::invalid_argument("closed_form_1d: need at least 2 labels");
    for (std::size_t i = 0; i + 1 < labels.size(); ++i)
        if (!(labels[i].first < labels[i + 1].first))
            throw std::invalid_argument("closed_form_1d: label abscissae must strictly ascend");
    if (p != kPInfinity && p < 2)
        throw std::invalid_argument("closed_form_1d: p must be >= 2 or infinity");

    // first integral of the 1D Euler-Lagrange equation: mu^2 |f'|^{p-2} f'
    // constant on each label interval, so f' is proportional to mu^{-2/(p-1)}
    const double expo = p == kPInfinity ? 0.0 : 2.0 / (p - 1.0);
    const auto weight = [density, expo](double t) {
        const double mu = eval_density(density, {t});
        if (!(mu > 0.0))
            throw std::invalid_argument("closed_form_1d: density vanishes on the labeled hull");
        return std::pow(mu, -expo);
    };

    // cumulative weight within each label interval: analytic for piecewise-
    // constant densities, adaptive quadrature otherwise
    const bool piecewise = std::holds_alternative<PiecewiseConstant1D>(density);
    struct Interval {
        double x0, x1, y0, y1, total;
    };
    const auto cumulative = [density, weight, expo, piecewise](double a, double t) -> double {
        if (piecewise) {
            const auto& pc = std::get<PiecewiseConstant1D>(density);
            double s = 0.0;
            for (std::size_t c = 0; c + 1 < pc.breakpoints.size(); ++c) {
                const double l = std::max(a, pc.breakpoints[c]);
                const double r = std::min(t, pc.breakpoints[c + 1]);
                if (r > l) s += (r - l) * std::pow(pc.values[c], -expo);
            }
            return s;
        }
        return integrate_adaptive(weight, a, t, 1e-11).value;
    };

    std::vector<Interval> ivs;
    ivs.reserve(labels.size() - 1);
    for (std::size_t i = 0; i + 1 < labels.size(); ++i) {
        Interval iv;
        iv.x0 = labels[i].first;
        iv.x1 = labels[i + 1].first;
        iv.y0 = labels[i].second;
        iv.y1 = labels[i + 1].second;
        iv.total = cumulative(iv.x0, iv.x1);
        if (!(iv.total > 0.0)) throw std::invalid_argument("closed_form_1d: degenerate interval");
        ivs.push_back(iv);
    }

    ScalarField out;
    out.dim = 1;
    out.value = [ivs, cumulative](const Point& x) {
        const double t = x[0];
        if (t <= ivs.front().x0) return ivs.front().y0;
        if (t >= ivs.back().x1) return ivs.back().y1;
        for (const Interval& iv : ivs) {
            if (t <= iv.x1)
                return iv.y0 + (iv.y1 - iv.y0) * cumulative(iv.x0, t) / iv.total;
        }
        return ivs.back().y1;
    };
    out.gradient = [ivs, weight](const Point& x) {
        const double t = x[0];
        if (t < ivs.front().x0 || t > ivs.back().x1) return Point{0.0};
        for (const Interval& iv : ivs) {
            if (t <= iv.x1) return Point{(iv.y1 - iv.y0) * weight(t) / iv.total};
        }
        return Point{0.0};
    };
    return out;
}

double infinity_laplacian(const ScalarField& f, const Point& x, double fd_step) {
    const Point g = field_gradient(f, x, fd_step);
    double g2 = 0.0;
    for (double v : g) g2 += v * v;
    const double tiny = 1e-12 * std::max(1.0, std::abs(f.value(x)));
    if (std::sqrt(g2) < tiny) return 0.0;
    const std::vector<double> h = field_hessian(f, x, fd_step);
    const std::size_t d = x.size();
    double num = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) num += g[i] * h[i * d + j] * g[j];
    return num / g2;
}

double el_residual(const ScalarField& f, const DensityModel& density, int p, const Point& x,
                   double fd_step) {
    if (p < 2) throw std::invalid_argument("el_residual: p must be >= 2");
    const double mu = eval_density(density, x);
    if (!(mu > 0.0)) throw std::invalid_argument("el_residual: density vanishes at x");
    const Point glog = grad_log_density(density, x);  // throws at breakpoints
    const Point g = field_gradient(f, x, fd_step);
    const std::vector<double> h = field_hessian(f, x, fd_step);
    const std::size_t d = x.size();
    double lap2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) lap2 += h[i * d + i];
    double drift = 0.0;
    for (std::size_t i = 0; i < d; ++i) drift += glog[i] * g[i];
    return lap2 + 2.0 * drift + (p - 2) * infinity_laplacian(f, x, fd_step);
}

namespace {

/// |grad| profile of the two degenerate families as a function of radius.
struct SpikeProfile {
    double radius;  // integration ball radius
    std::function<double(double)> grad_mag;
};

SpikeProfile cone_profile(double epsilon) {
    return {epsilon, [epsilon](double) { return 1.0 / epsilon; }};
}

SpikeProfile log_profile(double epsilon) {
    const double L = std::log((1.0 + epsilon) / epsilon);
    return {1.0, [epsilon, L](double r) { return 2.0 * r / ((r * r + epsilon) * L); }};
}

Point support_centroid(const DensityModel& density) {
    Point lo, hi;
    support_box(density, lo, hi);
    Point c(lo.size());
    for (std::size_t k = 0; k < lo.size(); ++k) c[k] = 0.5 * (lo[k] + hi[k]);
    return c;
}

bool uniform_covers_ball(const DensityModel& density, const Point& anchor, double radius) {
    if (!std::holds_alternative<UniformBox>(density)) return false;
    const auto& u = std::get<UniformBox>(density);
    for (std::size_t k = 0; k < anchor.size(); ++k)
        if (anchor[k] - radius < u.lo[k] || anchor[k] + radius > u.hi[k]) return false;
    return true;
}

double spike_value(const SpikeProfile& prof, int exponent, int d, const DensityModel& density,
                   const QuadratureSpec& quad) {
    const Point anchor = support_centroid(density);
    if (uniform_covers_ball(density, anchor, prof.radius) ||
        std::holds_alternative<AdaptiveQuad>(quad)) {
        if (!uniform_covers_ball(density, anchor, prof.radius))
            throw std::invalid_argument(
                "spike_family: radial quadrature needs a uniform density covering the ball");
        const double mu0 = eval_density(density, anchor);
        const double tol =
            std::holds_alternative<AdaptiveQuad>(quad) ? std::get<AdaptiveQuad>(quad).abs_tol : 1e-10;
        const auto integrand = [&](double r) {
            return std::pow(prof.grad_mag(r), exponent) * std::pow(r, d - 1);
        };
        return mu0 * mu0 * sphere_area(d) *
               integrate_adaptive(integrand, 0.0, prof.radius, tol).value;
    }
    // general densities: integrate over the ball's bounding box
    Point lo(anchor), hi(anchor);
    for (std::size_t k = 0; k < anchor.size(); ++k) {
        lo[k] -= prof.radius;
        hi[k] += prof.radius;
    }
    const auto integrand = [&](const Point& x) {
        double r2 = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double t = x[k] - anchor[k];
            r2 += t * t;
        }
        const double r = std::sqrt(r2);
        if (r > prof.radius) return 0.0;
        const double mu = eval_density(density, x);
        return std::pow(prof.grad_mag(r), exponent) * mu * mu;
    };
    if (std::holds_alternative<TensorGridQuad>(quad))
        return integrate_tensor(integrand, lo, hi, std::get<TensorGridQuad>(quad).points_per_axis)
            .value;
    const auto& mq = std::get<MonteCarloQuad>(quad);
    return integrate_monte_carlo(integrand, lo, hi, mq.samples, mq.seed).value;
}

}  // namespace

SpikeResult spike_family(int p, int d, double epsilon, const DensityModel& density,
                         const QuadratureSpec& quad) {
    if (p > d) throw std::invalid_argument("spike_family: family is degenerate only for p <= d");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("spike_family: epsilon must lie in (0,1)");
    if (dimension(density) != d) throw std::invalid_argument("spike_family: dimension mismatch");
    const double mu_max = density_sup(density);
    SpikeResult out;
    if (p <= d - 1) {
        out.value = spike_value(cone_profile(epsilon), p, d, density, quad);
        out.paper_bound = mu_max * mu_max * ball_volume(d) * std::pow(epsilon, d - p);
    } else {
        out.value = spike_value(log_profile(epsilon), p, d, density, quad);
        const double L = std::log((1.0 + epsilon) / epsilon);
        out.paper_bound = d * mu_max * mu_max * ball_volume(d) / (2.0 * std::pow(L, d - 1));
    }
    return out;
}

double spike_energy(int exponent, int d, double epsilon, const DensityModel& density,
                    const QuadratureSpec& quad) {
    if (exponent < 1) throw std::invalid_argument("spike_energy: exponent must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("spike_energy: epsilon must lie in (0,1)");
    return spike_value(cone_profile(epsilon), exponent, d, density, quad);
}

TensorCheckResult tensor_contraction_check(const std::function<double(double)>& w,
                                           double support_radius, int p, int d, const Point& u,
                                           std::size_t mc_samples, std::uint64_t seed) {
    if (static_cast<int>(u.size()) != d)
        throw std::invalid_argument("tensor_contraction_check: u dimension mismatch");
    Point lo(d, -support_radius), hi(d, support_radius);
    const auto integrand = [&](const Point& z) {
        double r2 = 0.0, dot = 0.0;
        for (int k = 0; k < d; ++k) {
            r2 += z[k] * z[k];
            dot += u[k] * z[k];
        }
        const double r = std::sqrt(r2);
        if (r > support_radius) return 0.0;
        return w(r) * std::pow(dot, p);
    };
    const QuadResult mc = integrate_monte_carlo(integrand, lo, hi, mc_samples, seed);
    TensorCheckResult out;
    out.lhs = mc.value;
    out.mc_stderr = mc.error;
    if (p % 2 == 0) {
        double unorm2 = 0.0;
        for (double v : u) unorm2 += v * v;
        const double radial =
            integrate_adaptive([&](double r) { return w(r) * std::pow(r, p + d - 1); }, 0.0,
                               support_radius, 1e-12)
                .value;
        out.rhs = std::pow(static_cast<double>(d), -0.5 * p) * sphere_area(d) * radial *
                  std::pow(unorm2, 0.5 * p);
    } else {
        out.rhs = 0.0;
    }
    return out;
}

}  // namespace plap
