#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "zec/agent.hpp"
#include "zec/baselines.hpp"
#include "zec/domain.hpp"

namespace zec::harness {

/// Scenarios 1 and 2 are the reference communities. Scenario 3 draws ten
/// houses from `seed`: cells uniform over {0, 12, ..., 72}, initial charge
/// uniform in [0, 7.2] kWh, daily means cycling through the reference houses.
ScenarioConfig build_scenario(int id, Season season, std::uint64_t seed);

/// Canonical key = value text form of a scenario, schema_version first.
std::string serialize_config(const ScenarioConfig& config);
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const ScenarioConfig& config);

/// FNV-1a 64 of the canonical serialization, as 16 hex digits.
std::string config_digest(const ScenarioConfig& config);

struct RunOptions {
    int episodes = 0;        // 0 = the scenario's own episode count
    StepSink step_sink;      // optional per-slot observer
};

struct RunReport {
    Strategy strategy = Strategy::Learned;
    std::uint64_t seed = 0;
    std::string config_digest;
    std::vector<EpisodeReport> episodes;

    [[nodiscard]] std::vector<double> community_series() const;
    /// Mean community status over the last `n` episodes.
    [[nodiscard]] double tail_mean(std::size_t n) const;

    friend bool operator==(const RunReport&, const RunReport&) = default;
};

/// Trains (Learned) or evaluates (baselines) for the configured number of
/// episodes using one generator seeded from config.seed. Learned runs follow
/// the ε schedule over the episode count.
RunReport run(const ScenarioConfig& config, Strategy strategy, const RunOptions& options = {});

struct CompareRow {
    Strategy strategy = Strategy::Learned;
    int episode = 0;
    double mean = 0.0;
    double sd = 0.0;
    int runs = 0;

    friend bool operator==(const CompareRow&, const CompareRow&) = default;
};

struct Comparison {
    std::vector<CompareRow> rows;       // strategy order as given, then episode
    std::vector<RunReport> reports;     // strategy-major, seed-minor

    friend bool operator==(const Comparison&, const Comparison&) = default;
};

/// Runs every (strategy, seed) pair and aggregates mean and sample standard
/// deviation of the community status per episode. Runs execute in parallel
/// with OpenMP; results are joined by position, so the output does not
/// depend on completion order.
Comparison compare(const ScenarioConfig& config, const std::vector<Strategy>& strategies, int episodes,
                   const std::vector<std::uint64_t>& seeds);

/// Single-threaded reference for compare().
Comparison compare_serial(const ScenarioConfig& config, const std::vector<Strategy>& strategies, int episodes,
                          const std::vector<std::uint64_t>& seeds);

// --- report files ---------------------------------------------------------

void write_report_csv(std::ostream& out, const RunReport& report);
void write_agents_csv(std::ostream& out, const RunReport& report);
void write_compare_csv(std::ostream& out, const Comparison& comparison);
void write_steps_header(std::ostream& out);
void write_steps_rows(std::ostream& out, int episode, std::span<const StepOutcome> outcomes);

/// Writes report.csv, agents.csv, steps.csv and config.txt into `dir`.
/// `steps_from_episode` limits steps.csv to episodes >= that index.
RunReport run_to_directory(const ScenarioConfig& config, Strategy strategy, const std::filesystem::path& dir,
                           int episodes, int steps_from_episode);

}  // namespace zec::harness
