#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "plap/continuum.hpp"
#include "plap/density.hpp"
#include "plap/rng.hpp"

using namespace plap;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("c_p closed forms") {
    CHECK(c_p(indicator_kernel(), 2, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    CHECK(c_p(indicator_kernel(), 2, 2) == doctest::Approx(kPi / 4.0).epsilon(1e-9));
    CHECK(c_p(indicator_kernel(), 4, 1) == doctest::Approx(2.0 / 5.0).epsilon(1e-9));
    CHECK_THROWS_AS((void)c_p(indicator_kernel(), 3, 2), std::invalid_argument);
}

TEST_CASE("i_p integral factor") {
    const ScalarField lin = linear_field({1.0});
    const DensityModel uni = make_uniform({0.0}, {1.0});
    CHECK(i_p(lin, uni, 2, AdaptiveQuad{1e-10}).value == doctest::Approx(1.0).epsilon(1e-8));

    const ClusterInstance cl = make_cluster_instance(0.25);
    // unit gradient: integral of mu^2 = 2 (0.75 a^2 + 0.25 b^2) = 0.5
    CHECK(i_p(lin, cl.density, 2, AdaptiveQuad{1e-10}).value ==
          doctest::Approx(0.5).epsilon(1e-8));

    const ClusterInstance cl2 = make_cluster_instance(0.05);
    const ScalarField target = field_1d([cl2](double x) { return cl2.target(x); });
    CHECK(i_p(target, cl2.density, 2, AdaptiveQuad{1e-9}).value ==
          doctest::Approx(2.0).epsilon(2e-4));

    CHECK_THROWS_AS((void)i_p(lin, make_uniform({0.0, 0.0}, {1.0, 1.0}), 2, AdaptiveQuad{}),
                    std::invalid_argument);
}

TEST_CASE("i_p rotation invariance for radial data") {
    const DensityModel radial = make_gaussian_mixture({{0.0, 0.0}}, {0.7}, {1.0});
    const ScalarField f = squared_norm_field(2);
    const double theta = 0.83;
    ScalarField rotated;
    rotated.dim = 2;
    rotated.value = [theta](const Point& x) {
        const double u = std::cos(theta) * x[0] - std::sin(theta) * x[1];
        const double v = std::sin(theta) * x[0] + std::cos(theta) * x[1];
        return u * u + v * v;
    };
    const double a = i_p(f, radial, 2, TensorGridQuad{96}).value;
    const double b = i_p(rotated, radial, 2, TensorGridQuad{96}).value;
    CHECK(a == doctest::Approx(b).epsilon(1e-6));
}

TEST_CASE("closed_form_1d") {
    const DensityModel uni = make_uniform({0.0}, {1.0});
    const ScalarField lin = closed_form_1d(uni, {{0.0, 0.0}, {1.0, 1.0}}, 2);
    for (const double x : {0.1, 0.37, 0.62, 0.95})
        CHECK(lin.value({x}) == doctest::Approx(x).epsilon(1e-12));
    // constant extension outside the hull
    CHECK(lin.value({-0.3}) == 0.0);
    CHECK(lin.value({1.4}) == 1.0);

    // a = b at eps = 1/4 makes the weight constant, hence a straight line
    const ClusterInstance cl = make_cluster_instance(0.25);
    const ScalarField flat = closed_form_1d(cl.density, {{-1.0, -1.0}, {1.0, 1.0}}, 2);
    for (const double x : {-0.7, -0.1, 0.4, 0.9})
        CHECK(flat.value({x}) == doctest::Approx(x).epsilon(1e-12));

    // slope ratio between cluster and bulk equals (a/b)^2 for p = 2
    const ClusterInstance c2 = make_cluster_instance(0.01);
    const ScalarField f2 = closed_form_1d(c2.density, {{-1.0, -1.0}, {1.0, 1.0}}, 2);
    const double inner = f2.gradient({0.0})[0];
    const double outer = f2.gradient({0.5})[0];
    CHECK(inner / outer == doctest::Approx(std::pow(c2.a / c2.b, 2)).epsilon(1e-10));

    // p = infinity ignores the density
    const ScalarField finf = closed_form_1d(c2.density, {{-1.0, -1.0}, {1.0, 1.0}}, kPInfinity);
    CHECK(finf.value({0.25}) == doctest::Approx(0.25).epsilon(1e-12));

    CHECK_THROWS_AS((void)closed_form_1d(uni, {{0.0, 0.0}}, 2), std::invalid_argument);
    CHECK_THROWS_AS((void)closed_form_1d(uni, {{0.5, 0.0}, {0.2, 1.0}}, 2),
                    std::invalid_argument);
}

TEST_CASE("el_residual") {
    const DensityModel uni2 = make_uniform({-1.0, -1.0}, {1.0, 1.0});
    const ScalarField lin = linear_field({0.7, -0.3});
    for (const int p : {2, 4, 8})
        CHECK(std::abs(el_residual(lin, uni2, p, {0.2, 0.1}, 1e-4)) < 1e-9);

    // |x|^2 in d=2 under uniform density: Delta_2 = 4, Delta_inf = 2
    const ScalarField sq = squared_norm_field(2);
    CHECK(el_residual(sq, uni2, 2, {0.3, -0.2}, 1e-4) == doctest::Approx(4.0).epsilon(1e-7));
    CHECK(el_residual(sq, uni2, 4, {0.3, -0.2}, 1e-4) == doctest::Approx(8.0).epsilon(1e-7));

    // the 1D closed form solves the ODE away from breakpoints
    const ClusterInstance cl = make_cluster_instance(0.01);
    const ScalarField f = closed_form_1d(cl.density, {{-1.0, -1.0}, {1.0, 1.0}}, 2);
    CHECK(std::abs(el_residual(f, cl.density, 2, {0.5}, 1e-4)) <= 1e-4);
    // 100 interior off-breakpoint points
    Rng rng(4);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        double x = rng.uniform(-0.95, 0.95);
        if (std::abs(std::abs(x) - cl.epsilon) < 5e-3) continue;  // stay off the kink
        worst = std::max(worst, std::abs(el_residual(f, cl.density, 2, {x}, 1e-4)));
    }
    CHECK(worst <= 1e-4);

    CHECK_THROWS_AS((void)el_residual(f, cl.density, 2, {cl.epsilon}, 1e-4),
                    std::invalid_argument);
}

TEST_CASE("infinity laplacian") {
    const ScalarField norm3 = norm_field(3);
    CHECK(infinity_laplacian(norm3, {1.0, 0.0, 0.0}, 1e-4) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(infinity_laplacian(norm3, {0.4, -0.5, 0.3}, 1e-4) == doctest::Approx(0.0).epsilon(1e-12));

    const ScalarField sq = squared_norm_field(2);
    CHECK(infinity_laplacian(sq, {0.5, 0.2}, 1e-4) == doctest::Approx(2.0).epsilon(1e-9));

    ScalarField constant;
    constant.dim = 2;
    constant.value = [](const Point&) { return 3.0; };
    CHECK(infinity_laplacian(constant, {0.1, 0.1}, 1e-4) == 0.0);
}

TEST_CASE("spike families") {
    const DensityModel uni3 = make_uniform({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
    const SpikeResult a = spike_family(2, 3, 0.1, uni3, AdaptiveQuad{1e-11});
    const SpikeResult b = spike_family(2, 3, 0.05, uni3, AdaptiveQuad{1e-11});
    CHECK(b.value / a.value == doctest::Approx(0.5).epsilon(0.05));
    CHECK(a.value <= a.paper_bound * (1.0 + 1e-9));
    CHECK(b.value <= b.paper_bound * (1.0 + 1e-9));
    // uniform density attains the bound exactly
    CHECK(a.value == doctest::Approx(a.paper_bound).epsilon(1e-8));

    // degenerate: monotone decreasing value as eps shrinks, for p <= d
    double prev = 1e300;
    for (const double eps : {0.1, 0.05, 0.025, 0.0125}) {
        const double v = spike_family(2, 3, eps, uni3, AdaptiveQuad{1e-11}).value;
        CHECK(v < prev);
        prev = v;
    }

    const DensityModel uni2 = make_uniform({-1.25, -1.25}, {1.25, 1.25});
    prev = 1e300;
    for (const double eps : {0.1, 0.01, 0.001}) {
        const SpikeResult r = spike_family(2, 2, eps, uni2, AdaptiveQuad{1e-11});
        CHECK(r.value < prev);
        prev = r.value;
        const double scaled = r.value * std::log((1.0 + eps) / eps);
        CHECK(scaled > 0.05);
        CHECK(scaled < 10.0);
    }

    // p = d+1 on the same cone family is not degenerate: it grows
    const double g1 = spike_energy(4, 3, 0.1, uni3, AdaptiveQuad{1e-11});
    const double g2 = spike_energy(4, 3, 0.05, uni3, AdaptiveQuad{1e-11});
    CHECK(g2 > g1 * 1.5);

    CHECK_THROWS_AS((void)spike_family(4, 3, 0.1, uni3, AdaptiveQuad{}), std::invalid_argument);
    CHECK_THROWS_AS((void)spike_family(2, 3, 1.5, uni3, AdaptiveQuad{}), std::invalid_argument);
}

TEST_CASE("spike family Monte Carlo route") {
    const DensityModel uni3 = make_uniform({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
    const SpikeResult radial = spike_family(2, 3, 0.1, uni3, AdaptiveQuad{1e-11});
    const SpikeResult mc = spike_family(2, 3, 0.1, uni3, MonteCarloQuad{400000, 3});
    CHECK(mc.value == doctest::Approx(radial.value).epsilon(0.02));
}

TEST_CASE("tensor contraction identity") {
    const auto w = [](double r) { return r <= 1.0 ? 1.0 : 0.0; };
    const TensorCheckResult r = tensor_contraction_check(w, 1.0, 2, 2, {1.0, 0.0}, 400000, 9);
    CHECK(r.rhs == doctest::Approx(kPi / 4.0).epsilon(1e-9));
    CHECK(std::abs(r.lhs - r.rhs) <= 3.0 * r.mc_stderr);

    const TensorCheckResult odd = tensor_contraction_check(w, 1.0, 3, 2, {0.6, -0.8}, 400000, 10);
    CHECK(odd.rhs == 0.0);
    CHECK(std::abs(odd.lhs) <= 3.0 * odd.mc_stderr);

    const TensorCheckResult zero = tensor_contraction_check(w, 1.0, 2, 2, {0.0, 0.0}, 1000, 11);
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs == 0.0);
}
