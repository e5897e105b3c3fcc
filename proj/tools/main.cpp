#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oclreid/errors.hpp"
#include "oclreid/runner.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string preset;
    std::string strategy; // empty: keep the config's (default reservoir)
    std::string mode;     // empty: keep the config's (default deterministic)
    std::string out_dir;
    bool dump_memory = false;
};

oclreid::RunConfig build_config(const CommonOpts& opts,
                                std::optional<std::uint64_t> seed_override) {
    oclreid::RunConfig cfg;
    if (!opts.config_path.empty()) {
        cfg = oclreid::load_run_config(opts.config_path);
    } else if (opts.preset.empty()) {
        throw oclreid::ConfigError("need --config or --preset");
    }
    const std::uint64_t seed = seed_override.value_or(cfg.seed);
    if (!opts.preset.empty())
        cfg.scenario = oclreid::make_preset(opts.preset, seed);
    if (!opts.strategy.empty())
        cfg.strategy = oclreid::strategy_from_string(opts.strategy);
    if (!opts.mode.empty()) cfg.mode = oclreid::mode_from_string(opts.mode);
    cfg.seed = seed;
    if (opts.dump_memory) cfg.dump_memory = true;
    if (!opts.out_dir.empty())
        cfg.out_dir = opts.out_dir + "/" + cfg.scenario.name + "-" +
                      std::string(oclreid::to_string(cfg.strategy)) + "-s" +
                      std::to_string(seed);
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online-continual-learning person ReID on synthetic streams"};
    app.require_subcommand(1);

    CommonOpts opts;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "JSON run config");
        sub->add_option("--preset", opts.preset, "scenario preset (corridor|room)");
        sub->add_option("--strategy", opts.strategy,
                        "fixed|naive|reservoir|mir");
        sub->add_option("--mode", opts.mode, "deterministic|concurrent");
        sub->add_option("--out", opts.out_dir, "output directory");
        sub->add_flag("--dump-memory", opts.dump_memory,
                      "write the memory buffers on completion");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "execute one run");
    add_common(run_cmd);
    std::uint64_t run_seed = 1;
    CLI::Option* run_seed_opt = run_cmd->add_option("--seed", run_seed, "run seed");

    CLI::App* cmp_cmd =
        app.add_subcommand("compare", "run several strategies and summarize");
    std::vector<std::string> cmp_strategies{"fixed", "reservoir"};
    std::vector<std::uint64_t> cmp_seeds{1, 2, 3};
    add_common(cmp_cmd);
    cmp_cmd->add_option("--strategies", cmp_strategies,
                        "strategies to compare");
    cmp_cmd->add_option("--seed", cmp_seeds, "seeds (repeatable)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            oclreid::RunConfig cfg = build_config(
                opts, run_seed_opt->count() > 0
                          ? std::optional<std::uint64_t>(run_seed)
                          : std::nullopt);
            oclreid::RunArtifacts artifacts = oclreid::run(cfg);
            for (const auto& line : artifacts.metrics_records)
                std::cout << line << '\n';
            if (!cfg.out_dir.empty())
                std::cout << "artifacts written to " << cfg.out_dir << '\n';
        } else {
            std::vector<oclreid::RunConfig> configs;
            for (const auto& strategy : cmp_strategies)
                for (std::uint64_t seed : cmp_seeds) {
                    CommonOpts o = opts;
                    o.strategy = strategy;
                    configs.push_back(build_config(o, seed));
                }
            std::cout << oclreid::compare(configs).render();
        }
    } catch (const oclreid::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const oclreid::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
