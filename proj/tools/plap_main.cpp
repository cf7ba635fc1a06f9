#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "plap/experiments.hpp"

namespace {

const char* kExperiments[] = {"graph-demo", "limit-check",    "degeneracy", "spectrum",
                              "rates",      "penalized-check", "amle-check"};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"p-Laplacian regularization experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 0;
    int replicates = 0;
    bool have_seed = false;

    for (const char* name : kExperiments) {
        CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "global seed")->each([&](const std::string&) {
            have_seed = true;
        });
        sub->add_option("--threads", threads, "replicate worker count");
        sub->add_option("--replicates", replicates, "replicate count");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string name = app.get_subcommands().front()->get_name();

    plap::ExperimentConfig cfg;
    cfg.experiment = name;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "error: cannot open config " << config_path << "\n";
                return 2;
            }
            nlohmann::json j = nlohmann::json::parse(in);
            j["experiment"] = name;
            cfg = plap::config_from_json(j);
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (have_seed) cfg.seed = seed;
        if (threads > 0) cfg.threads = threads;
        if (replicates > 0) cfg.replicates = replicates;
        if (cfg.out_dir.empty()) cfg.out_dir = "out/" + name;

        const plap::ExperimentReport rep = plap::run_experiment(cfg);
        std::printf("experiment %s finished in %.2fs; wrote %zu files to %s\n", name.c_str(),
                    rep.wall_time_s, rep.files.size(), cfg.out_dir.c_str());
        int failed = 0;
        for (const plap::Assertion& a : rep.assertions) {
            std::printf("  [%s] %s (value=%.6g)\n", a.pass ? "ok" : "FAIL", a.name.c_str(),
                        a.value);
            failed += a.pass ? 0 : 1;
        }
        return failed == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
