#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "plap/density.hpp"
#include "plap/estimators.hpp"
#include "plap/rng.hpp"
#include "plap/spectrum.hpp"

using namespace plap;

namespace {

RegressionSample sample_of(std::vector<double> xs, std::vector<double> ys) {
    RegressionSample s;
    s.xs = std::move(xs);
    s.ys = std::move(ys);
    return s;
}

}  // namespace

TEST_CASE("regression samples are sorted and reproducible") {
    const ClusterInstance cl = make_cluster_instance(0.1);
    const RegressionSample a = make_regression_sample(cl, 200, 0.2, 7);
    const RegressionSample b = make_regression_sample(cl, 200, 0.2, 7);
    CHECK(a.xs == b.xs);
    CHECK(a.ys == b.ys);
    CHECK(std::is_sorted(a.xs.begin(), a.xs.end()));
    CHECK_THROWS_AS((void)make_regression_sample(cl, 1, 0.2, 7), std::invalid_argument);
}

TEST_CASE("fit_rkhs basics") {
    const DensityModel uni = make_piecewise_constant({-1.0, 1.0}, {0.5});

    const RegressionSample zeros = sample_of({-0.4, 0.1, 0.6}, {0.0, 0.0, 0.0});
    const FittedModel mz = fit_rkhs(zeros, 0.01, uni);
    for (const double a : std::get<RkhsModel>(mz).alpha) CHECK(a == 0.0);
    CHECK(evaluate(mz, 0.3) == 0.0);

    // ridge shrinkage: huge lambda sends the fit to zero
    const RegressionSample s = sample_of({-0.5, 0.0, 0.5}, {1.0, -1.0, 2.0});
    const FittedModel big = fit_rkhs(s, 1e8, uni);
    CHECK(std::abs(evaluate(big, 0.2)) < 1e-5);

    // 2x2 oracle: K(x,y) = 2 - 2|x-y|, xs = {-0.5, 0.5} gives G = [[2,0],[0,2]]
    const RegressionSample two = sample_of({-0.5, 0.5}, {0.0, 1.0});
    const double lambda = 0.1;
    const FittedModel m2 = fit_rkhs(two, lambda, uni);
    Eigen::Matrix2d G;
    G << 2.0, 0.0, 0.0, 2.0;
    Eigen::Matrix2d A = G + 2.0 * lambda * Eigen::Matrix2d::Identity();
    const Eigen::Vector2d alpha = A.ldlt().solve(Eigen::Vector2d(0.0, 1.0));
    const auto& rm = std::get<RkhsModel>(m2);
    CHECK(rm.alpha[0] == doctest::Approx(alpha(0)).epsilon(1e-12));
    CHECK(rm.alpha[1] == doctest::Approx(alpha(1)).epsilon(1e-12));
    CHECK(evaluate(m2, -0.5) ==
          doctest::Approx(alpha(0) * 2.0 + alpha(1) * 0.0).epsilon(1e-12));
    CHECK(rm.h_seminorm == doctest::Approx(alpha.dot(G * alpha)).epsilon(1e-12));

    // residual invariant
    const ClusterInstance cl = make_cluster_instance(0.05);
    const RegressionSample big_s = make_regression_sample(cl, 150, 0.22, 3);
    const FittedModel mf = fit_rkhs(big_s, 1e-4, cl.density);
    const auto& rmf = std::get<RkhsModel>(mf);
    double total = 0.0;
    const auto prof = kernel_k_profile(cl.density, big_s.xs, total);
    double resid2 = 0.0, ynorm2 = 0.0;
    for (std::size_t i = 0; i < big_s.xs.size(); ++i) {
        double row = static_cast<double>(big_s.xs.size()) * 1e-4 * rmf.alpha[i];
        for (std::size_t j = 0; j < big_s.xs.size(); ++j)
            row += (0.25 * total - 0.5 * std::abs(prof[i] - prof[j])) * rmf.alpha[j];
        resid2 += (row - big_s.ys[i]) * (row - big_s.ys[i]);
        ynorm2 += big_s.ys[i] * big_s.ys[i];
    }
    CHECK(std::sqrt(resid2) <= 1e-8 * std::sqrt(ynorm2));

    // singular system: duplicate xs at lambda = 0
    const RegressionSample dup = sample_of({0.2, 0.2, 0.7}, {0.0, 1.0, 0.5});
    CHECK_THROWS_AS((void)fit_rkhs(dup, 0.0, uni), std::runtime_error);
}

TEST_CASE("fit_lipschitz basics") {
    // huge L: interpolation
    const RegressionSample s = sample_of({0.0, 0.3, 1.0}, {0.0, 2.0, -1.0});
    const FittedModel loose = fit_lipschitz(s, 1e6);
    CHECK(std::get<LipschitzModel>(loose).fitted == s.ys);

    // L = 0: the mean
    const FittedModel flat = fit_lipschitz(s, 0.0);
    for (const double v : std::get<LipschitzModel>(flat).fitted)
        CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-10));

    // two points, KKT projection onto |f2 - f1| <= 1 preserving the mean
    const RegressionSample two = sample_of({0.0, 1.0}, {0.0, 10.0});
    const FittedModel proj = fit_lipschitz(two, 1.0);
    CHECK(std::get<LipschitzModel>(proj).fitted[0] == doctest::Approx(4.5).epsilon(1e-10));
    CHECK(std::get<LipschitzModel>(proj).fitted[1] == doctest::Approx(5.5).epsilon(1e-10));

    // prediction: piecewise linear with constant extension
    CHECK(evaluate(proj, 0.5) == doctest::Approx(5.0).epsilon(1e-10));
    CHECK(evaluate(proj, -3.0) == doctest::Approx(4.5).epsilon(1e-10));
    CHECK(evaluate(proj, 3.0) == doctest::Approx(5.5).epsilon(1e-10));
}

TEST_CASE("fit_lipschitz optimality on random data") {
    Rng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 30 + rng.index(50);
        RegressionSample s;
        s.xs.resize(n);
        s.ys.resize(n);
        double x = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x += rng.uniform(0.01, 0.1);
            s.xs[i] = x;
            s.ys[i] = rng.uniform(-1.0, 1.0);
        }
        const double L = rng.uniform(0.5, 8.0);
        const FittedModel m = fit_lipschitz(s, L);
        const auto& f = std::get<LipschitzModel>(m).fitted;
        // feasible within 1e-8
        for (std::size_t i = 0; i + 1 < n; ++i)
            CHECK(std::abs(f[i + 1] - f[i]) <= L * (s.xs[i + 1] - s.xs[i]) + 1e-8);
        // fixed point of one more projected-gradient step
        const std::vector<double> moved = lipschitz_pg_step(s, L, f);
        double drift = 0.0;
        for (std::size_t i = 0; i < n; ++i) drift = std::max(drift, std::abs(moved[i] - f[i]));
        CHECK(drift <= 1e-8);
        // no worse than the greedy clipped competitor
        std::vector<double> greedy(n);
        greedy[0] = s.ys[0];
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double c = L * (s.xs[i + 1] - s.xs[i]);
            greedy[i + 1] = std::clamp(s.ys[i + 1], greedy[i] - c, greedy[i] + c);
        }
        double obj_fit = 0.0, obj_greedy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            obj_fit += (f[i] - s.ys[i]) * (f[i] - s.ys[i]);
            obj_greedy += (greedy[i] - s.ys[i]) * (greedy[i] - s.ys[i]);
        }
        CHECK(obj_fit <= obj_greedy + 1e-10);
    }
}

TEST_CASE("cross validation") {
    const DensityModel uni = make_piecewise_constant({-1.0, 1.0}, {0.5});
    const auto fitter = [&uni](const RegressionSample& train, double lam) {
        return fit_rkhs(train, lam, uni);
    };

    RegressionSample s;
    Rng rng(19);
    for (int i = 0; i < 60; ++i) s.xs.push_back(rng.uniform(-1.0, 1.0));
    std::sort(s.xs.begin(), s.xs.end());
    for (const double x : s.xs) s.ys.push_back(0.8 * x);  // noiseless linear data

    const CvResult one = cross_validate(fitter, s, {0.37}, 5, 5);
    CHECK(one.best_param == 0.37);

    const CvResult pick = cross_validate(fitter, s, {1e-6, 1e3}, 5, 5);
    CHECK(pick.best_param == 1e-6);
    CHECK(pick.curve.size() == 2);
    CHECK(pick.curve[0].second < pick.curve[1].second);

    // seeded determinism
    const CvResult again = cross_validate(fitter, s, {1e-6, 1e3}, 5, 5);
    CHECK(again.curve == pick.curve);

    CHECK_THROWS_AS((void)cross_validate(fitter, s, {}, 5, 5), std::invalid_argument);
    CHECK_THROWS_AS((void)cross_validate(fitter, s, {1.0}, 1, 5), std::invalid_argument);
}

TEST_CASE("empirical error") {
    const TargetFunction one{{-1.0, 1.0}, {1.0, 1.0}};
    RegressionSample s = sample_of({-0.5, 0.0, 0.5}, {0.0, 0.0, 0.0});
    const FittedModel zero = fit_lipschitz(s, 1e6);
    CHECK(empirical_error(zero, one, s.xs) == doctest::Approx(1.0));

    const TargetFunction ramp{{-1.0, 1.0}, {-1.0, 1.0}};
    RegressionSample t = sample_of({-1.0, 0.0, 1.0}, {-1.0, 0.0, 1.0});
    const FittedModel exact = fit_lipschitz(t, 1e6);
    CHECK(empirical_error(exact, ramp, t.xs) == doctest::Approx(0.0));

    RegressionSample c = sample_of({-1.0, 0.0, 1.0}, {-0.7, 0.3, 1.3});
    const FittedModel off = fit_lipschitz(c, 1e6);
    CHECK(empirical_error(off, ramp, c.xs) == doctest::Approx(0.09));

    // odd-part post-step: symmetrizing an even fit yields zero
    RegressionSample e = sample_of({-1.0, 0.0, 1.0}, {0.5, 0.1, 0.5});
    const FittedModel even = fit_lipschitz(e, 1e6);
    CHECK(evaluate_odd_part(even, 0.7) == doctest::Approx(0.0).epsilon(1e-12));
}
