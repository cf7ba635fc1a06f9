#include "plap/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <thread>

#include "plap/continuum.hpp"
#include "plap/csv.hpp"
#include "plap/density.hpp"
#include "plap/estimators.hpp"
#include "plap/graph.hpp"
#include "plap/rng.hpp"
#include "plap/solve.hpp"
#include "plap/spectrum.hpp"
#include "plap/svg.hpp"

namespace plap {

namespace fs = std::filesystem;

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.experiment = j.at("experiment").get<std::string>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
    if (j.contains("replicates")) cfg.replicates = j.at("replicates").get<int>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    if (j.contains("params")) cfg.params = j.at("params");
    return cfg;
}

std::string file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("file_checksum: cannot open " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[65536];
    while (in) {
        in.read(buf, sizeof buf);
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    const int workers = std::min(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    for (std::thread& t : pool) t.join();
}

namespace {

double param_or(const nlohmann::json& p, const char* key, double def) {
    return p.contains(key) ? p.at(key).get<double>() : def;
}

EdgeKernel kernel_from_name(const std::string& name) {
    if (name == "indicator") return indicator_kernel();
    if (name == "gaussian") return gaussian_kernel();
    throw std::invalid_argument("unknown kernel '" + name + "'");
}

struct Outputs {
    std::string dir;
    std::vector<std::string> files;

    std::string path(const std::string& name) {
        files.push_back(name);
        return (fs::path(dir) / name).string();
    }
};

// ---------------------------------------------------------------- graph-demo

ExperimentReport graph_demo(const ExperimentConfig& cfg, Outputs& out) {
    ExperimentReport rep;
    const auto& p = cfg.params;
    const std::size_t n_per = static_cast<std::size_t>(param_or(p, "n_per_component", 500));
    const double h = param_or(p, "h", 0.4);
    const EdgeKernel kernel = kernel_from_name(
        p.contains("kernel") ? p.at("kernel").get<std::string>() : std::string("gaussian"));

    std::vector<DensityModel> components;
    if (p.contains("components")) {
        for (const auto& cj : p.at("components"))
            components.push_back(density_from_json(cj.dump()));
    } else {
        components.push_back(make_gaussian_mixture({{0.0}}, {1.0}, {1.0}));
        components.push_back(make_gaussian_mixture({{4.0}}, {1.0}, {1.0}));
    }
    std::vector<std::pair<double, double>> label_pts = {{0.0, -1.0}, {4.0, 1.0}};
    if (p.contains("labels")) {
        label_pts.clear();
        for (const auto& lj : p.at("labels")) label_pts.emplace_back(lj.at(0), lj.at(1));
    }
    std::vector<int> p_list = {2};
    if (p.contains("p_list")) p_list = p.at("p_list").get<std::vector<int>>();

    std::vector<Point> pts;
    Rng rng(cfg.seed);
    for (std::size_t c = 0; c < components.size(); ++c) {
        auto drawn = sample(components[c], n_per, rng.split(c + 1).next_u64());
        pts.insert(pts.end(), drawn.begin(), drawn.end());
    }
    LabelSet labels;
    for (const auto& [x, y] : label_pts) {
        labels.entries.push_back({static_cast<std::uint32_t>(pts.size()), y});
        pts.push_back({x});
    }
    const GeometricGraph graph = build_graph(std::move(pts), kernel, h);

    std::vector<std::pair<std::string, SolveResult>> solutions;
    for (int pv : p_list)
        solutions.emplace_back("p" + std::to_string(pv), solve_even_p(graph, labels, pv));
    solutions.emplace_back("lex", solve_lex(graph, labels));

    // CSV sorted by the 1D coordinate
    std::vector<std::size_t> order(graph.num_vertices());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return graph.points[a][0] < graph.points[b][0];
    });
    {
        CsvWriter csv(out.path("solution.csv"));
        std::vector<std::string> head = {"x"};
        for (const auto& [name, _] : solutions) head.push_back(name);
        csv.row(head);
        for (const std::size_t v : order) {
            std::vector<std::string> row = {format_double(graph.points[v][0])};
            for (const auto& [_, sol] : solutions) row.push_back(format_double(sol.f[v]));
            csv.row(row);
        }
    }
    {
        std::vector<Series> series;
        for (const auto& [name, sol] : solutions) {
            Series s;
            s.name = name;
            for (const std::size_t v : order) s.points.emplace_back(graph.points[v][0], sol.f[v]);
            series.push_back(std::move(s));
        }
        PlotStyle style;
        style.title = "graph solutions";
        style.xlabel = "x";
        style.ylabel = "f";
        render_plot(series, style, out.path("solution.svg"));
    }

    // assertions (the Fig 1/2 qualitative checks)
    const SolveResult& lex = solutions.back().second;
    const double x_lo = std::min(label_pts.front().first, label_pts.back().first);
    const double x_hi = std::max(label_pts.front().first, label_pts.back().first);
    std::size_t inversions = 0, between = 0;
    double prev = 0.0;
    bool have_prev = false;
    for (const std::size_t v : order) {
        const double x = graph.points[v][0];
        if (x < x_lo || x > x_hi) continue;
        ++between;
        if (have_prev && lex.f[v] < prev - 1e-9) ++inversions;
        prev = lex.f[v];
        have_prev = true;
    }
    const double inv_frac = between ? static_cast<double>(inversions) / between : 0.0;
    rep.assertions.push_back({"lex_monotone_inversion_fraction", inv_frac <= 0.01, inv_frac});

    const SolveResult& p2 = solutions.front().second;
    std::size_t max_edge = 0;
    for (std::size_t e = 1; e < p2.edge_gradients.size(); ++e)
        if (p2.edge_gradients[e] > p2.edge_gradients[max_edge]) max_edge = e;
    std::vector<bool> is_label(graph.num_vertices(), false);
    for (const Label& l : labels.entries) is_label[l.vertex] = true;
    const bool touches_label =
        is_label[graph.edges[max_edge].i] || is_label[graph.edges[max_edge].j];
    rep.assertions.push_back(
        {"p2_max_gradient_at_labeled_vertex", touches_label, p2.edge_gradients[max_edge]});

    const double ratio = p2.edge_gradients[max_edge] / lex.objective;
    rep.assertions.push_back({"p2_over_lex_max_gradient_ratio", ratio >= 3.0, ratio});
    return rep;
}

// ---------------------------------------------------------------- limit-check

ExperimentReport limit_check(const ExperimentConfig& cfg, Outputs& out) {
    ExperimentReport rep;
    const auto& pj = cfg.params;
    const std::size_t n = static_cast<std::size_t>(param_or(pj, "n", 2000));
    const double h = param_or(pj, "h", 0.05);
    const int seeds = cfg.replicates;
    std::vector<int> p_list = {2, 4};
    if (pj.contains("p_list")) p_list = pj.at("p_list").get<std::vector<int>>();

    const DensityModel density = make_uniform({0.0}, {1.0});
    const ScalarField field = linear_field({1.0});
    const EdgeKernel kernel = indicator_kernel();

    CsvWriter csv(out.path("limit_check.csv"));
    csv.row({"p", "seed", "scaled_jp", "reference"});
    for (const int p : p_list) {
        const double ref =
            c_p(kernel, p, 1) * i_p(field, density, p, AdaptiveQuad{1e-8}).value;
        double mean = 0.0;
        for (int s = 0; s < seeds; ++s) {
            const auto pts = sample(density, n, split_seed(cfg.seed, 100 * p + s));
            const GeometricGraph g = build_graph(pts, kernel, h);
            VertexFunction f(g.num_vertices());
            for (std::size_t v = 0; v < f.size(); ++v) f[v] = g.points[v][0];
            const double val = scaled_jp(g, f, p);
            mean += val;
            csv.row_values(static_cast<double>(p), static_cast<double>(s), val, ref);
        }
        mean /= seeds;
        const double rel = std::abs(mean - ref) / ref;
        rep.assertions.push_back(
            {"limit_p" + std::to_string(p) + "_relative_error", rel <= 0.15, rel});
    }
    csv.close();
    return rep;
}

// ---------------------------------------------------------------- degeneracy

ExperimentReport degeneracy(const ExperimentConfig& cfg, Outputs& out) {
    ExperimentReport rep;
    (void)cfg;
    CsvWriter csv(out.path("degeneracy.csv"));
    csv.row({"family", "p", "d", "epsilon", "value", "bound_or_scaled"});

    // cone family, (p,d) = (2,3): value halves with epsilon and obeys the bound
    {
        const DensityModel density = make_uniform({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
        const std::vector<double> eps = {0.1, 0.05, 0.025};
        std::vector<double> values;
        bool bound_ok = true;
        for (const double e : eps) {
            const SpikeResult r = spike_family(2, 3, e, density, AdaptiveQuad{1e-10});
            values.push_back(r.value);
            bound_ok = bound_ok && r.value <= r.paper_bound * (1.0 + 1e-9);
            csv.row({"cone", "2", "3", format_double(e), format_double(r.value),
                     format_double(r.paper_bound)});
        }
        double worst = 0.0;
        for (std::size_t i = 0; i + 1 < values.size(); ++i)
            worst = std::max(worst, std::abs(values[i + 1] / values[i] - 0.5));
        rep.assertions.push_back({"cone_halving_ratio_error", worst <= 0.1, worst});
        rep.assertions.push_back({"cone_value_below_bound", bound_ok, bound_ok ? 1.0 : 0.0});
    }

    // log family, (p,d) = (2,2): value * log((1+eps)/eps) stays bounded
    {
        const DensityModel density = make_uniform({-1.25, -1.25}, {1.25, 1.25});
        std::vector<double> scaled;
        for (const double e : {1e-1, 1e-2, 1e-3, 1e-4}) {
            const SpikeResult r = spike_family(2, 2, e, density, AdaptiveQuad{1e-11});
            const double s = r.value * std::log((1.0 + e) / e);
            scaled.push_back(s);
            csv.row({"log", "2", "2", format_double(e), format_double(r.value),
                     format_double(s)});
        }
        const double ratio = *std::max_element(scaled.begin(), scaled.end()) /
                             *std::min_element(scaled.begin(), scaled.end());
        rep.assertions.push_back({"log_scaled_value_bounded", ratio <= 2.0, ratio});
    }

    // contrast: the same cone integrand with exponent d+1 blows up instead
    {
        const DensityModel density = make_uniform({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
        double prev = -1.0;
        bool growing = true;
        for (const double e : {0.1, 0.05, 0.025}) {
            const double v = spike_energy(4, 3, e, density, AdaptiveQuad{1e-10});
            csv.row({"cone_contrast", "4", "3", format_double(e), format_double(v), ""});
            if (prev >= 0.0 && v <= prev) growing = false;
            prev = v;
        }
        rep.assertions.push_back({"contrast_p_eq_d_plus_1_grows", growing, growing ? 1.0 : 0.0});
    }
    csv.close();
    return rep;
}

// ---------------------------------------------------------------- spectrum

ExperimentReport spectrum_experiment(const ExperimentConfig& cfg, Outputs& out) {
    ExperimentReport rep;
    (void)cfg;
    CsvWriter csv(out.path("spectrum.csv"));
    csv.row({"epsilon", "k", "j", "gamma", "bound"});
    const int j_max = 40;
    for (const double eps : {0.04, 0.01}) {
        const Spectrum sp = eigenvalues(eps, j_max);
        bool bounds_ok = true;
        double worst_resid = 0.0;
        const double alpha = (1.0 - eps) / std::sqrt(sp.a);
        const double beta = eps / std::sqrt(sp.b);
        const double level = std::pow(sp.b / sp.a, 1.5);
        for (const double x : sp.roots)
            worst_resid = std::max(
                worst_resid, std::abs(std::tan(beta * x) * std::tan(alpha * x) - level));
        for (std::size_t k = 0; k < 2 * sp.k0; ++k)
            for (int j = 0; j <= j_max; ++j) {
                const double g = sp.gamma(k, j);
                const double b = eigen_bound(eps, k, j);
                if (g > b * (1.0 + 1e-9)) bounds_ok = false;
                if (j <= 10)
                    csv.row({format_double(eps), format_double(static_cast<double>(k)),
                             format_double(static_cast<double>(j)), format_double(g),
                             format_double(b)});
            }
        const std::string tag = format_double(eps);
        rep.assertions.push_back({"lemma3_bounds_hold_eps" + tag, bounds_ok, bounds_ok ? 1. : 0.});
        rep.assertions.push_back(
            {"gamma00_below_1.26_eps" + tag, sp.gamma(0, 0) <= 1.26, sp.gamma(0, 0)});
        rep.assertions.push_back(
            {"root_residual_eps" + tag, worst_resid <= 1e-8, worst_resid});
    }
    {
        const Spectrum sp = eigenvalues(1e-4, 0);
        rep.assertions.push_back({"x0_window_eps1e-4",
                                  sp.roots[0] >= 0.892 && sp.roots[0] <= 0.899, sp.roots[0]});
    }
    csv.close();
    return rep;
}

// ---------------------------------------------------------------- rates

struct RatesCell {
    double rkhs = 0.0;
    double lip = 0.0;
};

RatesCell rates_one_replicate(double eps, std::size_t n, double noise_sd, int folds,
                              std::uint64_t seed) {
    const ClusterInstance inst = make_cluster_instance(eps);
    const RegressionSample s = make_regression_sample(inst, n, noise_sd, seed);

    std::vector<double> lambda_grid;
    for (int e = -8; e <= 0; ++e) lambda_grid.push_back(std::pow(10.0, e));
    const auto rkhs_fitter = [&](const RegressionSample& train, double lam) {
        return fit_rkhs(train, lam, inst.density);
    };
    const CvResult cv_r =
        cross_validate(rkhs_fitter, s, lambda_grid, folds, split_seed(seed, 11));
    const FittedModel mr = fit_rkhs(s, cv_r.best_param, inst.density);

    // L grid descends (least regularized first) and pins 1/eps exactly
    std::vector<double> L_grid;
    {
        const double L_hi = 4.0 / eps, L_lo = 0.3;
        const int m = 8;
        for (int i = 0; i < m; ++i)
            L_grid.push_back(L_hi * std::pow(L_lo / L_hi, static_cast<double>(i) / (m - 1)));
        L_grid.push_back(1.0 / eps);
        std::sort(L_grid.begin(), L_grid.end(), std::greater<>());
        L_grid.erase(std::unique(L_grid.begin(), L_grid.end()), L_grid.end());
    }
    const auto lip_fitter = [&](const RegressionSample& train, double L) {
        return fit_lipschitz(train, L);
    };
    const CvResult cv_l = cross_validate(lip_fitter, s, L_grid, folds, split_seed(seed, 12));
    const FittedModel ml = fit_lipschitz(s, cv_l.best_param);

    RatesCell cell;
    cell.rkhs = empirical_error(mr, inst.target, s.xs);
    cell.lip = empirical_error(ml, inst.target, s.xs);
    return cell;
}

ExperimentReport rates(const ExperimentConfig& cfg, Outputs& out) {
    ExperimentReport rep;
    const auto& pj = cfg.params;
    const double noise_sd = std::sqrt(param_or(pj, "sigma_sq", 0.05));
    const int folds = static_cast<int>(param_or(pj, "folds", 5));
    const int reps = cfg.replicates;
    std::vector<double> eps_list = {0.1, 0.05, 0.01};
    if (pj.contains("eps_list")) eps_list = pj.at("eps_list").get<std::vector<double>>();
    const std::size_t n_fixed = static_cast<std::size_t>(param_or(pj, "n_fixed", 512));
    std::vector<std::size_t> n_list = {64, 128, 256, 512, 1024};
    if (pj.contains("n_list")) n_list = pj.at("n_list").get<std::vector<std::size_t>>();

    // (a)/(b): MSE across epsilon at fixed n
    std::vector<std::vector<RatesCell>> fixed(eps_list.size(),
                                              std::vector<RatesCell>(reps));
    for (std::size_t ei = 0; ei < eps_list.size(); ++ei) {
        parallel_for(reps, cfg.threads, [&, ei](int r) {
            fixed[ei][r] = rates_one_replicate(eps_list[ei], n_fixed, noise_sd, folds,
                                               split_seed(cfg.seed, 1000 + 100 * ei + r));
        });
    }
    std::vector<double> rk_mean(eps_list.size(), 0.0), lp_mean(eps_list.size(), 0.0);
    {
        CsvWriter csv(out.path("rates_fixed_n.csv"));
        csv.row({"method", "epsilon", "n", "replicate", "mse"});
        for (std::size_t ei = 0; ei < eps_list.size(); ++ei) {
            for (int r = 0; r < reps; ++r) {
                csv.row({"rkhs", format_double(eps_list[ei]),
                         format_double(static_cast<double>(n_fixed)),
                         format_double(static_cast<double>(r)),
                         format_double(fixed[ei][r].rkhs)});
                csv.row({"lipschitz", format_double(eps_list[ei]),
                         format_double(static_cast<double>(n_fixed)),
                         format_double(static_cast<double>(r)),
                         format_double(fixed[ei][r].lip)});
                rk_mean[ei] += fixed[ei][r].rkhs;
                lp_mean[ei] += fixed[ei][r].lip;
            }
            rk_mean[ei] /= reps;
            lp_mean[ei] /= reps;
        }
    }
    {
        CsvWriter csv(out.path("rates_fixed_n_mean.csv"));
        csv.row({"epsilon", "rkhs_mse", "lipschitz_mse"});
        for (std::size_t ei = 0; ei < eps_list.size(); ++ei)
            csv.row_values(eps_list[ei], rk_mean[ei], lp_mean[ei]);
    }
    const double rk_spread = *std::max_element(rk_mean.begin(), rk_mean.end()) /
                             *std::min_element(rk_mean.begin(), rk_mean.end());
    rep.assertions.push_back({"rkhs_mse_stable_in_eps", rk_spread < 2.0, rk_spread});
    const double lp_rise = lp_mean.back() / lp_mean.front();
    rep.assertions.push_back({"lipschitz_mse_rises_as_eps_shrinks", lp_rise >= 1.5, lp_rise});

    // (c): coupled eps = 1/n sweep
    std::vector<std::vector<RatesCell>> coupled(n_list.size(), std::vector<RatesCell>(reps));
    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
        parallel_for(reps, cfg.threads, [&, ni](int r) {
            const double eps = 1.0 / static_cast<double>(n_list[ni]);
            coupled[ni][r] = rates_one_replicate(eps, n_list[ni], noise_sd, folds,
                                                 split_seed(cfg.seed, 50000 + 100 * ni + r));
        });
    }
    std::vector<double> rk_scaled(n_list.size(), 0.0), lp_scaled(n_list.size(), 0.0);
    {
        CsvWriter csv(out.path("rates_coupled.csv"));
        csv.row({"method", "n", "epsilon", "replicate", "mse", "mse_times_n23"});
        for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
            const double n23 = std::pow(static_cast<double>(n_list[ni]), 2.0 / 3.0);
            double rk = 0.0, lp = 0.0;
            for (int r = 0; r < reps; ++r) {
                rk += coupled[ni][r].rkhs;
                lp += coupled[ni][r].lip;
                csv.row({"rkhs", format_double(static_cast<double>(n_list[ni])),
                         format_double(1.0 / n_list[ni]), format_double(static_cast<double>(r)),
                         format_double(coupled[ni][r].rkhs),
                         format_double(coupled[ni][r].rkhs * n23)});
                csv.row({"lipschitz", format_double(static_cast<double>(n_list[ni])),
                         format_double(1.0 / n_list[ni]), format_double(static_cast<double>(r)),
                         format_double(coupled[ni][r].lip),
                         format_double(coupled[ni][r].lip * n23)});
            }
            rk_scaled[ni] = rk / reps * n23;
            lp_scaled[ni] = lp / reps * n23;
        }
    }
    {
        CsvWriter csv(out.path("rates_coupled_mean.csv"));
        csv.row({"n", "rkhs_mse_times_n23", "lipschitz_mse_times_n23"});
        for (std::size_t ni = 0; ni < n_list.size(); ++ni)
            csv.row_values(static_cast<double>(n_list[ni]), rk_scaled[ni], lp_scaled[ni]);
    }
    {
        std::vector<Series> series(2);
        series[0].name = "rkhs";
        series[1].name = "lipschitz";
        for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
            series[0].points.emplace_back(static_cast<double>(n_list[ni]), rk_scaled[ni]);
            series[1].points.emplace_back(static_cast<double>(n_list[ni]), lp_scaled[ni]);
        }
        PlotStyle style;
        style.title = "MSE x n^(2/3), eps = 1/n";
        style.xlabel = "n";
        style.ylabel = "MSE x n^(2/3)";
        style.logx = true;
        style.logy = true;
        render_plot(series, style, out.path("rates_coupled.svg"));
    }
    {
        std::vector<Series> series(2);
        series[0].name = "rkhs";
        series[1].name = "lipschitz";
        for (std::size_t ei = 0; ei < eps_list.size(); ++ei) {
            series[0].points.emplace_back(eps_list[ei], rk_mean[ei]);
            series[1].points.emplace_back(eps_list[ei], lp_mean[ei]);
        }
        PlotStyle style;
        style.title = "MSE vs epsilon at fixed n";
        style.xlabel = "epsilon";
        style.ylabel = "MSE";
        style.logx = true;
        style.logy = true;
        render_plot(series, style, out.path("rates_fixed_n.svg"));
    }
    const double rk_flat = *std::max_element(rk_scaled.begin(), rk_scaled.end()) /
                           *std::min_element(rk_scaled.begin(), rk_scaled.end());
    rep.assertions.push_back({"coupled_rkhs_scaled_flat", rk_flat <= 2.0, rk_flat});
    const double lp_growth = lp_scaled.back() / lp_scaled.front();
    rep.assertions.push_back({"coupled_lipschitz_scaled_grows", lp_growth >= 2.0, lp_growth});
    return rep;
}

// ---------------------------------------------------------------- amle-check

ExperimentReport amle_check(const ExperimentConfig& cfg, Outputs& out) {
    ExperimentReport rep;
    // value-only field so the operators go through the finite-difference path
    ScalarField f;
    f.dim = 3;
    f.value = [](const Point& x) {
        return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    };
    Rng rng(cfg.seed);
    const double fd_step = 1e-4;
    double worst_inf = 0.0, worst_lap = 0.0;
    CsvWriter csv(out.path("amle_check.csv"));
    csv.row({"x1", "x2", "x3", "r", "inf_laplacian", "laplacian", "expected_laplacian"});
    for (int i = 0; i < 100; ++i) {
        Point x(3);
        double norm = 0.0;
        for (double& v : x) {
            v = rng.normal();
            norm += v * v;
        }
        norm = std::sqrt(norm);
        const double r = rng.uniform(0.5, 1.0);
        for (double& v : x) v *= r / norm;
        const double dinf = infinity_laplacian(f, x, fd_step);
        const double lap = [&] {
            const auto h = field_hessian(f, x, fd_step);
            return h[0] + h[4] + h[8];
        }();
        const double expected = 2.0 / r;
        worst_inf = std::max(worst_inf, std::abs(dinf));
        worst_lap = std::max(worst_lap, std::abs(lap - expected));
        csv.row_values(x[0], x[1], x[2], r, dinf, lap, expected);
    }
    csv.close();
    rep.assertions.push_back({"infinity_laplacian_vanishes", worst_inf <= 1e-6, worst_inf});
    rep.assertions.push_back({"laplacian_matches_dminus1_over_r", worst_lap <= 1e-4, worst_lap});
    return rep;
}

// ---------------------------------------------------------- penalized-check

ExperimentReport penalized_check(const ExperimentConfig& cfg, Outputs& out) {
    ExperimentReport rep;
    CsvWriter csv(out.path("penalized_check.csv"));
    csv.row({"graph", "p", "jp_penalized", "jp_constrained", "abs_diff"});
    SolveOptions opts;
    opts.rel_tol = 1e-13;
    opts.max_iters = 4000;
    opts.linear_solver_tol = 1e-12;
    double worst = 0.0;
    for (int gi = 0; gi < 10; ++gi) {
        Rng rng(split_seed(cfg.seed, 400 + gi));
        const std::size_t n = 30 + rng.index(71);
        std::vector<Point> pts(n);
        for (Point& pt : pts) pt = {rng.uniform()};
        // bandwidth just above the widest gap so the 1D graph is connected
        std::vector<double> xs(n);
        for (std::size_t i = 0; i < n; ++i) xs[i] = pts[i][0];
        std::sort(xs.begin(), xs.end());
        double max_gap = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) max_gap = std::max(max_gap, xs[i + 1] - xs[i]);
        GeometricGraph g = build_graph(pts, indicator_kernel(), std::max(0.1, 1.05 * max_gap));
        LabelSet labels;
        const std::size_t n_lab = 3 + rng.index(4);
        std::vector<std::uint32_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
        for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.index(i)]);
        for (std::size_t i = 0; i < n_lab; ++i)
            labels.entries.push_back({idx[i], rng.uniform(-1.0, 1.0)});
        const double lambda = 0.5;
        for (const int p : {2, 4}) {
            const SolveResult pen = solve_penalized(g, labels, p, lambda, opts);
            LabelSet fitted;
            for (const Label& l : labels.entries)
                fitted.entries.push_back({l.vertex, pen.f[l.vertex]});
            const SolveResult con = solve_even_p(g, fitted, p, opts);
            const double diff = std::abs(pen.objective - con.objective);
            worst = std::max(worst, diff);
            csv.row_values(static_cast<double>(gi), static_cast<double>(p), pen.objective,
                           con.objective, diff);
        }
    }
    csv.close();
    rep.assertions.push_back({"penalized_constrained_jp_match", worst <= 1e-6, worst});
    return rep;
}

void write_manifest(const ExperimentConfig& cfg, const ExperimentReport& rep, Outputs& out) {
    nlohmann::json m;
    m["experiment"] = cfg.experiment;
    m["config"] = {{"seed", cfg.seed},
                   {"out", cfg.out_dir},
                   {"replicates", cfg.replicates},
                   {"threads", cfg.threads},
                   {"params", cfg.params}};
    m["version"] = "plap 0.1.0";
    m["wall_time_s"] = rep.wall_time_s;
    nlohmann::json files = nlohmann::json::array();
    for (const std::string& f : rep.files)
        files.push_back({{"name", f}, {"fnv1a64", file_checksum((fs::path(out.dir) / f).string())}});
    m["files"] = files;
    nlohmann::json asserts = nlohmann::json::array();
    for (const Assertion& a : rep.assertions)
        asserts.push_back({{"name", a.name}, {"pass", a.pass}, {"value", a.value}});
    m["assertions"] = asserts;
    std::ofstream mf(fs::path(out.dir) / "manifest.json");
    mf << m.dump(2) << "\n";
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(cfg.out_dir);
    Outputs out;
    out.dir = cfg.out_dir;

    ExperimentReport rep;
    if (cfg.experiment == "graph-demo")
        rep = graph_demo(cfg, out);
    else if (cfg.experiment == "limit-check")
        rep = limit_check(cfg, out);
    else if (cfg.experiment == "degeneracy")
        rep = degeneracy(cfg, out);
    else if (cfg.experiment == "spectrum")
        rep = spectrum_experiment(cfg, out);
    else if (cfg.experiment == "rates")
        rep = rates(cfg, out);
    else if (cfg.experiment == "amle-check")
        rep = amle_check(cfg, out);
    else if (cfg.experiment == "penalized-check")
        rep = penalized_check(cfg, out);
    else
        throw std::invalid_argument("run_experiment: unknown experiment '" + cfg.experiment + "'");

    rep.files = out.files;
    rep.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(cfg, rep, out);
    return rep;
}

}  // namespace plap
