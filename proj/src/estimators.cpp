#include "plap/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "plap/rng.hpp"
#include "plap/spectrum.hpp"

namespace plap {

RegressionSample make_regression_sample(const ClusterInstance& inst, std::size_t n, double sigma,
                                        std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("make_regression_sample: n must be >= 2");
    RegressionSample s;
    s.sigma = sigma;
    s.seed = seed;
    Rng rng(seed);
    const std::vector<Point> pts = sample(inst.density, n, rng.split(1).next_u64());
    s.xs.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.xs[i] = pts[i][0];
    std::sort(s.xs.begin(), s.xs.end());
    Rng noise = rng.split(2);
    s.ys.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.ys[i] = inst.target(s.xs[i]) + sigma * noise.normal();
    return s;
}

double evaluate(const FittedModel& model, double x) {
    if (std::holds_alternative<RkhsModel>(model)) {
        const auto& m = std::get<RkhsModel>(model);
        double total = 0.0;
        const std::vector<double> fx = kernel_k_profile(m.density, {x}, total);
        double v = 0.0;
        for (std::size_t i = 0; i < m.xs.size(); ++i)
            v += m.alpha[i] * (0.25 * m.profile_total - 0.5 * std::abs(fx[0] - m.profile[i]));
        return v;
    }
    const auto& m = std::get<LipschitzModel>(model);
    const auto& xs = m.xs;
    if (x <= xs.front()) return m.fitted.front();
    if (x >= xs.back()) return m.fitted.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    if (xs[i + 1] == xs[i]) return m.fitted[i];
    const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return m.fitted[i] + t * (m.fitted[i + 1] - m.fitted[i]);
}

double evaluate_odd_part(const FittedModel& model, double x) {
    return 0.5 * (evaluate(model, x) - evaluate(model, -x));
}

FittedModel fit_rkhs(const RegressionSample& sample, double lambda, const DensityModel& density) {
    if (lambda < 0.0) throw std::invalid_argument("fit_rkhs: lambda must be nonnegative");
    const std::size_t n = sample.xs.size();
    RkhsModel m;
    m.density = density;
    m.xs = sample.xs;
    m.lambda = lambda;
    m.profile = kernel_k_profile(density, sample.xs, m.profile_total);

    Eigen::MatrixXd G(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = 0.25 * m.profile_total - 0.5 * std::abs(m.profile[i] - m.profile[j]);
            G(i, j) = v;
            G(j, i) = v;
        }
    Eigen::MatrixXd A = G;
    A.diagonal().array() += static_cast<double>(n) * lambda;
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(sample.ys.data(), n);
    Eigen::VectorXd alpha = A.ldlt().solve(y);
    const double resid = (A * alpha - y).norm();
    if (!(resid <= 1e-8 * std::max(1.0, y.norm())))
        throw std::runtime_error("fit_rkhs: singular ridge system (duplicate xs at lambda=0?)");
    m.alpha.assign(alpha.data(), alpha.data() + n);
    m.h_seminorm = alpha.dot(G * alpha);
    return m;
}

namespace {

/// Exact solve of min 1/2 ||f-y||^2 with (f_{i+1}-f_i) = s_i c_i on the
/// active constraints: maximal active runs pool into blocks whose offset
/// pattern is fixed, so the block level is a mean.
void solve_pattern(const std::vector<double>& y, const std::vector<double>& c,
                   const std::vector<int>& sgn, std::vector<double>& f) {
    const std::size_t n = y.size();
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && sgn[j] != 0) ++j;
        // block [i, j]
        double off = 0.0, acc = 0.0;
        std::vector<double> offs(j - i + 1, 0.0);
        for (std::size_t k = i; k < j; ++k) {
            off += sgn[k] * c[k];
            offs[k - i + 1] = off;
        }
        for (std::size_t k = i; k <= j; ++k) acc += y[k] - offs[k - i];
        const double level = acc / static_cast<double>(j - i + 1);
        for (std::size_t k = i; k <= j; ++k) f[k] = level + offs[k - i];
        i = j + 1;
    }
}

}  // namespace

FittedModel fit_lipschitz(const RegressionSample& sample, double L) {
    if (!(L >= 0.0)) throw std::invalid_argument("fit_lipschitz: L must be nonnegative");
    const std::size_t n = sample.xs.size();
    LipschitzModel m;
    m.xs = sample.xs;
    m.L = L;
    if (n == 1) {
        m.fitted = sample.ys;
        return m;
    }
    const std::vector<double>& y = sample.ys;
    std::vector<double> c(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) c[i] = L * (sample.xs[i + 1] - sample.xs[i]);

    // primal-dual active set on the chain-difference constraints
    std::vector<int> sgn(n - 1, 0);
    std::vector<double> f(y);
    const double scale = [&] {
        double lo = *std::min_element(y.begin(), y.end());
        double hi = *std::max_element(y.begin(), y.end());
        return std::max(hi - lo, 1e-12);
    }();
    const double tol = 1e-12 * scale;

    bool ok = false;
    for (int pass = 0; pass < 400 && !ok; ++pass) {
        solve_pattern(y, c, sgn, f);
        ok = true;
        // multipliers nu_k = cumulative sum of (f - y); drop wrong signs first
        double nu = 0.0;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            nu += f[k] - y[k];
            if (sgn[k] != 0 && nu * sgn[k] < -tol) {
                sgn[k] = 0;
                ok = false;
            }
        }
        if (!ok) continue;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const double d = f[k + 1] - f[k];
            if (sgn[k] == 0 && std::abs(d) > c[k] + tol) {
                sgn[k] = d > 0.0 ? 1 : -1;
                ok = false;
            }
        }
    }
    if (!ok) throw std::runtime_error("fit_lipschitz: active-set iteration did not settle");
    // snap exactly onto the constraint set
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double d = f[k + 1] - f[k];
        if (std::abs(d) > c[k]) f[k + 1] = f[k] + (d > 0 ? c[k] : -c[k]);
    }
    m.fitted = std::move(f);
    return m;
}

std::vector<double> lipschitz_pg_step(const RegressionSample& sample, double L,
                                      const std::vector<double>& fitted) {
    const std::size_t n = sample.xs.size();
    // gradient of (1/n)||f - y||^2 is (2/n)(f - y); step n/2 gives z = 2f - y... use
    // a conservative step 1/2 in the natural scaling: z = f - (f - y) = y projected
    std::vector<double> z(n);
    const double step = 0.5;
    for (std::size_t i = 0; i < n; ++i)
        z[i] = fitted[i] - step * 2.0 * (fitted[i] - sample.ys[i]);
    // project onto the constraint polytope: same QP with z as the data
    RegressionSample proj;
    proj.xs = sample.xs;
    proj.ys = std::move(z);
    const FittedModel pm = fit_lipschitz(proj, L);
    return std::get<LipschitzModel>(pm).fitted;
}

CvResult cross_validate(const std::function<FittedModel(const RegressionSample&, double)>& fitter,
                        const RegressionSample& sample, const std::vector<double>& grid, int folds,
                        std::uint64_t seed) {
    if (folds < 2) throw std::invalid_argument("cross_validate: folds must be >= 2");
    if (grid.empty()) throw std::invalid_argument("cross_validate: parameter grid is empty");
    const std::size_t n = sample.xs.size();
    if (n < static_cast<std::size_t>(folds))
        throw std::invalid_argument("cross_validate: fewer points than folds");

    // seeded permutation; fold k takes indices k, k+folds, ...
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);

    std::vector<double> err(grid.size(), 0.0);
    for (int k = 0; k < folds; ++k) {
        RegressionSample train;
        train.sigma = sample.sigma;
        train.seed = sample.seed;
        std::vector<std::size_t> test;
        std::vector<std::pair<double, double>> tr;
        for (std::size_t i = 0; i < n; ++i) {
            if (static_cast<int>(i % folds) == k)
                test.push_back(perm[i]);
            else
                tr.emplace_back(sample.xs[perm[i]], sample.ys[perm[i]]);
        }
        if (test.empty()) throw std::invalid_argument("cross_validate: empty fold");
        std::sort(tr.begin(), tr.end());
        train.xs.reserve(tr.size());
        train.ys.reserve(tr.size());
        for (const auto& [x, yv] : tr) {
            train.xs.push_back(x);
            train.ys.push_back(yv);
        }
        for (std::size_t gi = 0; gi < grid.size(); ++gi) {
            const FittedModel model = fitter(train, grid[gi]);
            double e = 0.0;
            for (const std::size_t t : test) {
                const double d = evaluate(model, sample.xs[t]) - sample.ys[t];
                e += d * d;
            }
            err[gi] += e / static_cast<double>(test.size());
        }
    }

    CvResult res;
    std::size_t best = 0;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        const double mean = err[gi] / folds;
        res.curve.emplace_back(grid[gi], mean);
        if (mean <= err[best] / folds) best = gi;  // ties prefer the later (more regularized) entry
    }
    res.best_param = grid[best];
    return res;
}

double empirical_error(const FittedModel& model, const TargetFunction& target,
                       const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (const double x : xs) {
        const double d = evaluate(model, x) - target(x);
        s += d * d;
    }
    return s / static_cast<double>(xs.size());
}

}  // namespace plap
