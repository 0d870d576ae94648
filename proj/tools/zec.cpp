// zec: command line driver for the zero-energy community simulator.
//
//   zec run --scenario 1 --season winter --strategy learned --episodes 500 --seed 0 --out out/
//   zec compare --scenario 1 --season winter --episodes 500 --seeds 0,1,2 --out out/
//   zec gen-data --out data/
//   zec serve-cms --port 8080

#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zec/cms_http.hpp"
#include "zec/data.hpp"
#include "zec/harness.hpp"

namespace {

using namespace zec;

struct ScenarioFlags {
    int scenario = 1;
    std::string season = "winter";
    std::string config_path;
    int episodes = 0;
    std::uint64_t seed = 0;
};

void add_scenario_flags(CLI::App* cmd, ScenarioFlags& f)
{
    cmd->add_option("--scenario", f.scenario, "Scenario id: 1, 2 or 3")->check(CLI::IsMember({1, 2, 3}));
    cmd->add_option("--season", f.season, "winter or summer")->check(CLI::IsMember({"winter", "summer"}));
    cmd->add_option("--config", f.config_path, "Scenario configuration file (overrides --scenario/--season)");
    cmd->add_option("--episodes", f.episodes, "Episodes to run (default: from the scenario)");
}

ScenarioConfig resolve(const ScenarioFlags& f)
{
    ScenarioConfig config = f.config_path.empty()
                                ? harness::build_scenario(f.scenario, *parse_season(f.season), f.seed)
                                : harness::load_config(f.config_path);
    if (!f.config_path.empty()) config.seed = f.seed;
    if (f.episodes > 0) config.episodes = f.episodes;
    config.validate();
    return config;
}

Strategy strategy_from(const std::string& name)
{
    auto s = parse_strategy(name);
    if (!s) throw CLI::ValidationError("--strategy", "unknown strategy " + name);
    return *s;
}

cms::CmsHttpServer* g_server = nullptr;

void handle_signal(int)
{
    if (g_server) g_server->stop();
}

int run_command(const ScenarioFlags& f, const std::string& strategy_name, const std::string& out, int steps_from)
{
    const auto config = resolve(f);
    const Strategy strategy = strategy_from(strategy_name);
    const int first_step_episode = steps_from >= 0 ? steps_from : config.episodes - 1;
    const auto report = harness::run_to_directory(config, strategy, out, config.episodes, first_step_episode);
    std::cout << "scenario=" << config.name << " season=" << to_string(config.season)
              << " strategy=" << to_string(strategy) << " seed=" << config.seed
              << " episodes=" << report.episodes.size() << " digest=" << report.config_digest << '\n';
    std::cout << "final community status (mean of last 10 episodes): " << format_double(report.tail_mean(10))
              << " kWh\n";
    return 0;
}

int compare_command(const ScenarioFlags& f, const std::vector<std::string>& strategy_names,
                    const std::vector<std::uint64_t>& seeds, const std::string& out, bool serial)
{
    const auto config = resolve(f);
    std::vector<Strategy> strategies;
    for (const auto& n : strategy_names) strategies.push_back(strategy_from(n));
    const auto comparison = serial ? harness::compare_serial(config, strategies, config.episodes, seeds)
                                   : harness::compare(config, strategies, config.episodes, seeds);
    std::filesystem::create_directories(out);
    std::ofstream csv(std::filesystem::path(out) / "compare.csv");
    harness::write_compare_csv(csv, comparison);
    std::ofstream cfg(std::filesystem::path(out) / "config.txt");
    cfg << harness::serialize_config(config) << "# digest = " << harness::config_digest(config) << '\n';

    for (Strategy s : strategies) {
        double last = 0.0;
        for (const auto& row : comparison.rows) {
            if (row.strategy == s) last = row.mean;
        }
        std::cout << to_string(s) << ": final-episode mean community status " << format_double(last) << " kWh\n";
    }
    return 0;
}

int gen_data_command(const std::string& out, int days, std::uint64_t seed_base)
{
    std::filesystem::create_directories(out);
    const std::filesystem::path dir(out);
    for (Season season : {Season::Winter, Season::Summer}) {
        for (int house = 1; house <= 3; ++house) {
            const auto profile = data::synthesize_consumption(seed_base + static_cast<std::uint64_t>(house),
                                                              reference_daily_mean(house, season), days);
            data::save_consumption(dir / ("house" + std::to_string(house) + "_" + std::string(to_string(season)) +
                                          ".csv"),
                                   profile);
        }
        data::save_exposure(dir / ("exposure_" + std::string(to_string(season)) + ".csv"),
                            data::synthesize_exposure(season, days));
    }
    std::cout << "wrote consumption and exposure files to " << out << '\n';
    return 0;
}

int serve_command(const std::string& host, int port)
{
    cms::CommunityMonitor monitor;
    cms::CmsHttpServer server(monitor);
    g_server = &server;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    std::cout << "CMS listening on " << host << ':' << port << std::endl;
    const bool ok = server.listen(host, port);
    g_server = nullptr;
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-agent energy sharing simulator for zero-energy communities"};
    app.require_subcommand(1);

    ScenarioFlags run_flags;
    std::string strategy = "learned";
    std::string run_out = "out";
    int steps_from = -1;
    auto* run_cmd = app.add_subcommand("run", "Train or evaluate one strategy");
    add_scenario_flags(run_cmd, run_flags);
    run_cmd->add_option("--seed", run_flags.seed, "Run seed");
    run_cmd->add_option("--strategy", strategy, "learned, always, never or random")
        ->check(CLI::IsMember({"learned", "always", "never", "random"}));
    run_cmd->add_option("--out", run_out, "Output directory")->required();
    run_cmd->add_option("--steps-from", steps_from, "First episode logged to steps.csv (default: last episode)");

    ScenarioFlags cmp_flags;
    std::vector<std::string> cmp_strategies{"learned", "always", "never", "random"};
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    std::string cmp_out = "out";
    bool serial = false;
    auto* cmp_cmd = app.add_subcommand("compare", "Run several strategies over several seeds");
    add_scenario_flags(cmp_cmd, cmp_flags);
    cmp_cmd->add_option("--strategies", cmp_strategies, "Strategies to compare")->delimiter(',');
    cmp_cmd->add_option("--seeds", seeds, "Seeds")->delimiter(',');
    cmp_cmd->add_option("--out", cmp_out, "Output directory")->required();
    cmp_cmd->add_flag("--serial", serial, "Run on one thread");

    std::string data_out = "data";
    int data_days = 3;
    std::uint64_t data_seed = 0;
    auto* gen_cmd = app.add_subcommand("gen-data", "Write synthetic consumption and exposure files");
    gen_cmd->add_option("--out", data_out, "Output directory");
    gen_cmd->add_option("--days", data_days, "Days per file")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--seed", data_seed, "Seed base; house n uses seed base + n");

    std::string host = "0.0.0.0";
    int port = 8080;
    auto* serve_cmd = app.add_subcommand("serve-cms", "Run the community monitoring service over HTTP");
    serve_cmd->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
    serve_cmd->add_option("--host", host, "Bind address");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return run_command(run_flags, strategy, run_out, steps_from);
        if (*cmp_cmd) return compare_command(cmp_flags, cmp_strategies, seeds, cmp_out, serial);
        if (*gen_cmd) return gen_data_command(data_out, data_days, data_seed);
        if (*serve_cmd) return serve_command(host, port);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
