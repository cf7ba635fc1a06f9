#include "plap/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "plap/rng.hpp"

namespace plap {

namespace {

constexpr double kTwoPi = 6.28318530717958647692529;

double gauss_pdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(kTwoPi));
}

void check_dim(const DensityModel& model, const Point& x) {
    if (static_cast<int>(x.size()) != dimension(model))
        throw std::invalid_argument("density: point dimension mismatch");
}

}  // namespace

UniformBox make_uniform(Point lo, Point hi) {
    if (lo.empty() || lo.size() != hi.size())
        throw std::invalid_argument("make_uniform: inconsistent box");
    for (std::size_t k = 0; k < lo.size(); ++k)
        if (!(lo[k] < hi[k])) throw std::invalid_argument("make_uniform: lo must be < hi");
    return UniformBox{std::move(lo), std::move(hi)};
}

PiecewiseConstant1D make_piecewise_constant(std::vector<double> breakpoints,
                                            std::vector<double> values) {
    if (breakpoints.size() < 2 || values.size() + 1 != breakpoints.size())
        throw std::invalid_argument("make_piecewise_constant: need m+1 breakpoints for m cells");
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i] < breakpoints[i + 1]))
            throw std::invalid_argument("make_piecewise_constant: breakpoints must ascend");
        if (!(values[i] > 0.0))
            throw std::invalid_argument("make_piecewise_constant: cell values must be positive");
        mass += values[i] * (breakpoints[i + 1] - breakpoints[i]);
    }
    if (std::abs(mass - 1.0) > 1e-9)
        throw std::invalid_argument("make_piecewise_constant: density must integrate to 1");
    return PiecewiseConstant1D{std::move(breakpoints), std::move(values)};
}

GaussianMixture make_gaussian_mixture(std::vector<Point> means, std::vector<double> stddevs,
                                      std::vector<double> weights) {
    const std::size_t m = means.size();
    if (m == 0 || stddevs.size() != m || weights.size() != m)
        throw std::invalid_argument("make_gaussian_mixture: inconsistent component counts");
    const std::size_t d = means[0].size();
    double wsum = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        if (means[k].size() != d) throw std::invalid_argument("make_gaussian_mixture: mean dims differ");
        if (!(stddevs[k] > 0.0)) throw std::invalid_argument("make_gaussian_mixture: stddev must be positive");
        if (weights[k] < 0.0) throw std::invalid_argument("make_gaussian_mixture: negative weight");
        wsum += weights[k];
    }
    if (std::abs(wsum - 1.0) > 1e-12)
        throw std::invalid_argument("make_gaussian_mixture: weights must sum to 1");
    return GaussianMixture{std::move(means), std::move(stddevs), std::move(weights)};
}

int dimension(const DensityModel& model) {
    return std::visit(
        [](const auto& m) -> int {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, UniformBox>)
                return static_cast<int>(m.lo.size());
            else if constexpr (std::is_same_v<T, PiecewiseConstant1D>)
                return 1;
            else
                return static_cast<int>(m.means[0].size());
        },
        model);
}

double eval_density(const DensityModel& model, const Point& x) {
    check_dim(model, x);
    return std::visit(
        [&x](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, UniformBox>) {
                double vol = 1.0;
                for (std::size_t k = 0; k < m.lo.size(); ++k) {
                    if (x[k] < m.lo[k] || x[k] > m.hi[k]) return 0.0;
                    vol *= m.hi[k] - m.lo[k];
                }
                return 1.0 / vol;
            } else if constexpr (std::is_same_v<T, PiecewiseConstant1D>) {
                const double t = x[0];
                if (t < m.breakpoints.front() || t > m.breakpoints.back()) return 0.0;
                auto it = std::upper_bound(m.breakpoints.begin(), m.breakpoints.end(), t);
                std::size_t cell = static_cast<std::size_t>(it - m.breakpoints.begin());
                cell = cell == 0 ? 0 : cell - 1;
                if (cell >= m.values.size()) cell = m.values.size() - 1;
                return m.values[cell];
            } else {
                double v = 0.0;
                for (std::size_t k = 0; k < m.means.size(); ++k) {
                    double comp = m.weights[k];
                    for (std::size_t j = 0; j < x.size(); ++j)
                        comp *= gauss_pdf(x[j], m.means[k][j], m.stddevs[k]);
                    v += comp;
                }
                return v;
            }
        },
        model);
}

Point grad_log_density(const DensityModel& model, const Point& x) {
    check_dim(model, x);
    const double mu = eval_density(model, x);
    if (!(mu > 0.0)) throw std::invalid_argument("grad_log_density: zero density at x");
    return std::visit(
        [&x, mu](const auto& m) -> Point {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, UniformBox>) {
                return Point(x.size(), 0.0);
            } else if constexpr (std::is_same_v<T, PiecewiseConstant1D>) {
                for (double b : m.breakpoints)
                    if (x[0] == b)
                        throw std::invalid_argument("grad_log_density: undefined at a breakpoint");
                return Point(1, 0.0);
            } else {
                // grad log mu = sum_k w_k phi_k(x) * (-(x-m_k)/sd_k^2) / mu
                Point g(x.size(), 0.0);
                for (std::size_t k = 0; k < m.means.size(); ++k) {
                    double comp = m.weights[k];
                    for (std::size_t j = 0; j < x.size(); ++j)
                        comp *= gauss_pdf(x[j], m.means[k][j], m.stddevs[k]);
                    const double inv_var = 1.0 / (m.stddevs[k] * m.stddevs[k]);
                    for (std::size_t j = 0; j < x.size(); ++j)
                        g[j] -= comp * (x[j] - m.means[k][j]) * inv_var;
                }
                for (double& v : g) v /= mu;
                return g;
            }
        },
        model);
}

std::vector<Point> sample(const DensityModel& model, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
    Rng rng(seed);
    std::vector<Point> out;
    out.reserve(n);
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, UniformBox>) {
                const std::size_t d = m.lo.size();
                for (std::size_t i = 0; i < n; ++i) {
                    Point x(d);
                    for (std::size_t k = 0; k < d; ++k) x[k] = rng.uniform(m.lo[k], m.hi[k]);
                    out.push_back(std::move(x));
                }
            } else if constexpr (std::is_same_v<T, PiecewiseConstant1D>) {
                // cell masses, then inverse CDF within the chosen cell
                std::vector<double> cum(m.values.size() + 1, 0.0);
                for (std::size_t i = 0; i < m.values.size(); ++i)
                    cum[i + 1] = cum[i] + m.values[i] * (m.breakpoints[i + 1] - m.breakpoints[i]);
                const double total = cum.back();
                for (std::size_t i = 0; i < n; ++i) {
                    const double u = rng.uniform() * total;
                    auto it = std::upper_bound(cum.begin(), cum.end(), u);
                    std::size_t cell = static_cast<std::size_t>(it - cum.begin());
                    cell = cell == 0 ? 0 : cell - 1;
                    if (cell >= m.values.size()) cell = m.values.size() - 1;
                    const double t =
                        m.breakpoints[cell] + (u - cum[cell]) / m.values[cell];
                    out.push_back(Point{t});
                }
            } else {
                const std::size_t d = m.means[0].size();
                std::vector<double> cml(m.weights.size() + 1, 0.0);
                for (std::size_t k = 0; k < m.weights.size(); ++k) cml[k + 1] = cml[k] + m.weights[k];
                for (std::size_t i = 0; i < n; ++i) {
                    const double u = rng.uniform();
                    std::size_t k = 0;
                    while (k + 1 < m.weights.size() && u >= cml[k + 1]) ++k;
                    Point x(d);
                    for (std::size_t j = 0; j < d; ++j)
                        x[j] = m.means[k][j] + m.stddevs[k] * rng.normal();
                    out.push_back(std::move(x));
                }
            }
        },
        model);
    return out;
}

double density_sup(const DensityModel& model) {
    return std::visit(
        [](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, UniformBox>) {
                double vol = 1.0;
                for (std::size_t k = 0; k < m.lo.size(); ++k) vol *= m.hi[k] - m.lo[k];
                return 1.0 / vol;
            } else if constexpr (std::is_same_v<T, PiecewiseConstant1D>) {
                return *std::max_element(m.values.begin(), m.values.end());
            } else {
                const double d = static_cast<double>(m.means[0].size());
                double s = 0.0;
                for (std::size_t k = 0; k < m.means.size(); ++k)
                    s += m.weights[k] / std::pow(m.stddevs[k] * std::sqrt(kTwoPi), d);
                return s;
            }
        },
        model);
}

void support_box(const DensityModel& model, Point& lo, Point& hi) {
    std::visit(
        [&lo, &hi](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, UniformBox>) {
                lo = m.lo;
                hi = m.hi;
            } else if constexpr (std::is_same_v<T, PiecewiseConstant1D>) {
                lo = {m.breakpoints.front()};
                hi = {m.breakpoints.back()};
            } else {
                const std::size_t d = m.means[0].size();
                lo.assign(d, 1e300);
                hi.assign(d, -1e300);
                for (std::size_t k = 0; k < m.means.size(); ++k)
                    for (std::size_t j = 0; j < d; ++j) {
                        lo[j] = std::min(lo[j], m.means[k][j] - 8.0 * m.stddevs[k]);
                        hi[j] = std::max(hi[j], m.means[k][j] + 8.0 * m.stddevs[k]);
                    }
            }
        },
        model);
}

double TargetFunction::operator()(double x) const {
    if (breakpoints.empty()) throw std::invalid_argument("TargetFunction: empty");
    if (x <= breakpoints.front()) return values.front();
    if (x >= breakpoints.back()) return values.back();
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - breakpoints.begin()) - 1;
    const double t = (x - breakpoints[i]) / (breakpoints[i + 1] - breakpoints[i]);
    return values[i] + t * (values[i + 1] - values[i]);
}

double TargetFunction::lipschitz_constant() const {
    double lip = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        lip = std::max(lip, std::abs(values[i + 1] - values[i]) /
                                (breakpoints[i + 1] - breakpoints[i]));
    return lip;
}

ClusterInstance make_cluster_instance(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw std::invalid_argument("make_cluster_instance: epsilon must be in (0, 1/2)");
    const double b = std::sqrt(epsilon);
    const double a = (0.5 - epsilon * b) / (1.0 - epsilon);
    ClusterInstance inst;
    inst.epsilon = epsilon;
    inst.a = a;
    inst.b = b;
    inst.density = make_piecewise_constant({-1.0, -epsilon, epsilon, 1.0}, {a, b, a});
    inst.target = TargetFunction{{-1.0, -epsilon, epsilon, 1.0}, {-1.0, -1.0, 1.0, 1.0}};
    return inst;
}

std::string density_to_json(const DensityModel& model) {
    nlohmann::json j;
    std::visit(
        [&j](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, UniformBox>) {
                j["variant"] = "uniform";
                j["lo"] = m.lo;
                j["hi"] = m.hi;
            } else if constexpr (std::is_same_v<T, PiecewiseConstant1D>) {
                j["variant"] = "piecewise_constant_1d";
                j["breakpoints"] = m.breakpoints;
                j["values"] = m.values;
            } else {
                j["variant"] = "gaussian_mixture";
                j["means"] = m.means;
                j["stddevs"] = m.stddevs;
                j["weights"] = m.weights;
            }
        },
        model);
    return j.dump();
}

DensityModel density_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    const std::string variant = j.at("variant").get<std::string>();
    if (variant == "uniform")
        return make_uniform(j.at("lo").get<Point>(), j.at("hi").get<Point>());
    if (variant == "piecewise_constant_1d")
        return make_piecewise_constant(j.at("breakpoints").get<std::vector<double>>(),
                                       j.at("values").get<std::vector<double>>());
    if (variant == "gaussian_mixture")
        return make_gaussian_mixture(j.at("means").get<std::vector<Point>>(),
                                     j.at("stddevs").get<std::vector<double>>(),
                                     j.at("weights").get<std::vector<double>>());
    throw std::invalid_argument("density_from_json: unknown variant '" + variant + "'");
}

}  // namespace plap
