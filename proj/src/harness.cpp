#include "zec/harness.hpp"

#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "zec/cms.hpp"
#include "zec/data.hpp"

namespace zec::harness {

namespace {

std::string join_doubles(std::span<const double> values)
{
    std::string out;
    for (double v : values) {
        if (!out.empty()) out += ",";
        out += format_double(v);
    }
    return out;
}

std::vector<std::string> split(std::string_view text, char sep)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.emplace_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

template <typename Int>
Int parse_int(const std::string& text, std::string_view what)
{
    Int v{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw InvalidInput("cannot parse " + std::string(what) + ": '" + text + "'");
    }
    return v;
}

HouseConfig parse_house(const std::string& value)
{
    const auto f = split(value, ',');
    if (f.size() != 4 && f.size() != 6) {
        throw InvalidInput("house needs id,cells,initial_kwh,profile[,unit_kwh,units]: " + value);
    }
    HouseConfig h;
    h.agent_id = trim(f[0]);
    h.solar_cells = parse_int<int>(trim(f[1]), "solar cells");
    h.initial_charge = parse_double(trim(f[2]), "initial charge");
    h.consumption = ProfileRef::parse(trim(f[3]));
    if (f.size() == 6) {
        h.battery_unit_capacity = parse_double(trim(f[4]), "battery unit capacity");
        h.battery_units = parse_int<int>(trim(f[5]), "battery units");
    }
    return h;
}

}  // namespace

ScenarioConfig build_scenario(int id, Season season, std::uint64_t seed)
{
    ScenarioConfig config;
    switch (id) {
    case 1: config = table1_configs(season).first; break;
    case 2: config = table1_configs(season).second; break;
    case 3: {
        config.name = "scenario3";
        config.season = season;
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> cell_steps(0, 6);
        std::uniform_real_distribution<double> charge(0.0, 7.2);
        for (int k = 0; k < 10; ++k) {
            HouseConfig h;
            std::ostringstream name;
            name << "House" << std::setw(2) << std::setfill('0') << (k + 1);
            h.agent_id = name.str();
            h.solar_cells = 12 * cell_steps(rng);
            h.initial_charge = charge(rng);
            const int reference = k % 3 + 1;
            h.consumption = ProfileRef::synthetic(static_cast<std::uint64_t>(100 + k),
                                                  reference_daily_mean(reference, season));
            config.houses.push_back(std::move(h));
        }
        break;
    }
    default: throw InvalidInput("unknown scenario id " + std::to_string(id) + " (expected 1, 2 or 3)");
    }
    config.seed = seed;
    config.validate();
    return config;
}

std::string serialize_config(const ScenarioConfig& c)
{
    std::ostringstream out;
    out << "schema_version = " << ScenarioConfig::kSchemaVersion << '\n';
    out << "name = " << c.name << '\n';
    out << "season = " << to_string(c.season) << '\n';
    out << "days = " << c.days << '\n';
    out << "episodes = " << c.episodes << '\n';
    out << "seed = " << c.seed << '\n';
    out << "thresholds = " << join_doubles(c.thresholds.edges) << '\n';
    out << "yield_factor = " << format_double(c.yield_factor) << '\n';
    out << "donor_reserve = " << format_double(c.donor_reserve) << '\n';
    out << "transfer_loss = " << format_double(c.transfer_loss) << '\n';
    out << "exposure = " << (c.exposure ? c.exposure->to_string() : std::string("synthetic")) << '\n';
    out << "learning_rate = " << format_double(c.learning.learning_rate) << '\n';
    out << "discount = " << format_double(c.learning.discount) << '\n';
    out << "batch_size = " << c.learning.batch_size << '\n';
    out << "replay_capacity = " << c.learning.replay_capacity << '\n';
    out << "hidden_layers = ";
    for (std::size_t i = 0; i < c.learning.hidden_layers.size(); ++i) {
        out << (i ? "," : "") << c.learning.hidden_layers[i];
    }
    out << '\n';
    for (const auto& h : c.houses) {
        out << "house = " << h.agent_id << ',' << h.solar_cells << ',' << format_double(h.initial_charge) << ','
            << h.consumption.to_string() << ',' << format_double(h.battery_unit_capacity) << ','
            << h.battery_units << '\n';
    }
    return out.str();
}

ScenarioConfig parse_config(std::istream& in)
{
    ScenarioConfig c;
    c.houses.clear();
    std::string line;
    std::size_t line_no = 0;
    bool versioned = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidInput("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        try {
            if (!versioned) {
                if (key != "schema_version") throw InvalidInput("schema_version must come first");
                if (parse_int<int>(value, "schema_version") != ScenarioConfig::kSchemaVersion) {
                    throw InvalidInput("unsupported schema_version " + value);
                }
                versioned = true;
            } else if (key == "name") {
                c.name = value;
            } else if (key == "season") {
                auto s = parse_season(value);
                if (!s) throw InvalidInput("season must be winter or summer");
                c.season = *s;
            } else if (key == "days") {
                c.days = parse_int<int>(value, "days");
            } else if (key == "episodes") {
                c.episodes = parse_int<int>(value, "episodes");
            } else if (key == "seed") {
                c.seed = parse_int<std::uint64_t>(value, "seed");
            } else if (key == "thresholds") {
                const auto parts = split(value, ',');
                if (parts.size() != 3) throw InvalidInput("thresholds needs three values");
                for (std::size_t i = 0; i < 3; ++i) c.thresholds.edges[i] = parse_double(trim(parts[i]), "threshold");
            } else if (key == "yield_factor") {
                c.yield_factor = parse_double(value, "yield_factor");
            } else if (key == "donor_reserve") {
                c.donor_reserve = parse_double(value, "donor_reserve");
            } else if (key == "transfer_loss") {
                c.transfer_loss = parse_double(value, "transfer_loss");
            } else if (key == "exposure") {
                if (value == "synthetic") {
                    c.exposure.reset();
                } else {
                    c.exposure = ProfileRef::parse(value);
                }
            } else if (key == "learning_rate") {
                c.learning.learning_rate = parse_double(value, "learning_rate");
            } else if (key == "discount") {
                c.learning.discount = parse_double(value, "discount");
            } else if (key == "batch_size") {
                c.learning.batch_size = parse_int<int>(value, "batch_size");
            } else if (key == "replay_capacity") {
                c.learning.replay_capacity = parse_int<int>(value, "replay_capacity");
            } else if (key == "hidden_layers") {
                c.learning.hidden_layers.clear();
                for (const auto& p : split(value, ',')) c.learning.hidden_layers.push_back(parse_int<int>(trim(p), "hidden layer"));
            } else if (key == "house") {
                c.houses.push_back(parse_house(value));
            } else {
                throw InvalidInput("unknown key '" + key + "'");
            }
        } catch (const InvalidInput& e) {
            throw InvalidInput("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!versioned) throw InvalidInput("config has no schema_version");
    c.validate();
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open config " + path.string());
    return parse_config(in);
}

void save_config(const std::filesystem::path& path, const ScenarioConfig& config)
{
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write config " + path.string());
    out << serialize_config(config);
}

std::string config_digest(const ScenarioConfig& config)
{
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char ch : serialize_config(config)) {
        hash ^= ch;
        hash *= 1099511628211ull;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << hash;
    return out.str();
}

std::vector<double> RunReport::community_series() const
{
    std::vector<double> out;
    out.reserve(episodes.size());
    for (const auto& e : episodes) out.push_back(e.community_status);
    return out;
}

double RunReport::tail_mean(std::size_t n) const
{
    if (episodes.empty() || n == 0) return 0.0;
    n = std::min(n, episodes.size());
    double sum = 0.0;
    for (std::size_t i = episodes.size() - n; i < episodes.size(); ++i) sum += episodes[i].community_status;
    return sum / static_cast<double>(n);
}

RunReport run(const ScenarioConfig& config, Strategy strategy, const RunOptions& options)
{
    config.validate();
    const int episodes = options.episodes > 0 ? options.episodes : config.episodes;
    Environment env(config);
    cms::CommunityMonitor monitor;
    for (const auto& h : config.houses) monitor.join(h.agent_id);

    drl::Rng rng(config.seed);
    std::unique_ptr<Policy> policy;
    if (strategy == Strategy::Learned) {
        policy = std::make_unique<LearnedPolicy>(config, rng);
    } else {
        policy = std::make_unique<BaselinePolicy>(strategy);
    }
    const drl::EpsilonSchedule schedule(episodes);

    RunReport report;
    report.strategy = strategy;
    report.seed = config.seed;
    report.config_digest = config_digest(config);
    report.episodes.reserve(static_cast<std::size_t>(episodes));
    for (int e = 0; e < episodes; ++e) {
        const double epsilon = strategy == Strategy::Learned ? schedule(e) : 0.0;
        report.episodes.push_back(run_episode(*policy, env, monitor, e, epsilon, rng, options.step_sink));
        monitor.prune_before(static_cast<std::int64_t>(e + 1) * env.horizon());
    }
    return report;
}

namespace {

Comparison aggregate(const std::vector<Strategy>& strategies, int episodes, std::size_t seed_count,
                     std::vector<RunReport> reports)
{
    Comparison out;
    for (std::size_t si = 0; si < strategies.size(); ++si) {
        for (int e = 0; e < episodes; ++e) {
            double sum = 0.0;
            for (std::size_t k = 0; k < seed_count; ++k) {
                sum += reports[si * seed_count + k].episodes[static_cast<std::size_t>(e)].community_status;
            }
            const double mean = sum / static_cast<double>(seed_count);
            double ss = 0.0;
            for (std::size_t k = 0; k < seed_count; ++k) {
                const double d =
                    reports[si * seed_count + k].episodes[static_cast<std::size_t>(e)].community_status - mean;
                ss += d * d;
            }
            const double sd = seed_count > 1 ? std::sqrt(ss / static_cast<double>(seed_count - 1)) : 0.0;
            out.rows.push_back({strategies[si], e, mean, sd, static_cast<int>(seed_count)});
        }
    }
    out.reports = std::move(reports);
    return out;
}

void check_compare_args(const std::vector<Strategy>& strategies, int episodes,
                        const std::vector<std::uint64_t>& seeds)
{
    if (strategies.empty()) throw InvalidInput("compare needs at least one strategy");
    if (seeds.empty()) throw InvalidInput("compare needs at least one seed");
    if (episodes < 1) throw InvalidInput("compare needs at least one episode");
}

}  // namespace

Comparison compare(const ScenarioConfig& config, const std::vector<Strategy>& strategies, int episodes,
                   const std::vector<std::uint64_t>& seeds)
{
    check_compare_args(strategies, episodes, seeds);
    const auto jobs = static_cast<long>(strategies.size() * seeds.size());
    std::vector<RunReport> reports(static_cast<std::size_t>(jobs));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));

#pragma omp parallel for schedule(dynamic, 1)
    for (long j = 0; j < jobs; ++j) {
        const auto idx = static_cast<std::size_t>(j);
        try {
            ScenarioConfig c = config;
            c.seed = seeds[idx % seeds.size()];
            reports[idx] = run(c, strategies[idx / seeds.size()], RunOptions{episodes, {}});
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return aggregate(strategies, episodes, seeds.size(), std::move(reports));
}

Comparison compare_serial(const ScenarioConfig& config, const std::vector<Strategy>& strategies, int episodes,
                          const std::vector<std::uint64_t>& seeds)
{
    check_compare_args(strategies, episodes, seeds);
    std::vector<RunReport> reports;
    for (Strategy s : strategies) {
        for (auto seed : seeds) {
            ScenarioConfig c = config;
            c.seed = seed;
            reports.push_back(run(c, s, RunOptions{episodes, {}}));
        }
    }
    return aggregate(strategies, episodes, seeds.size(), std::move(reports));
}

void write_report_csv(std::ostream& out, const RunReport& report)
{
    out << "episode,strategy,seed,epsilon,community_status_kwh,grid_kwh,neighbour_kwh,wasted_kwh";
    if (!report.episodes.empty()) {
        for (const auto& a : report.episodes.front().agents) out << ",grid_kwh_" << a.agent_id;
        for (const auto& a : report.episodes.front().agents) out << ",neighbour_kwh_" << a.agent_id;
    }
    out << '\n';
    for (const auto& e : report.episodes) {
        double grid = 0.0;
        double neighbour = 0.0;
        double wasted = 0.0;
        for (const auto& a : e.agents) {
            grid += a.grid;
            neighbour += a.received_from_neighbours;
            wasted += a.wasted;
        }
        out << e.episode << ',' << to_string(report.strategy) << ',' << report.seed << ','
            << format_double(e.epsilon) << ',' << format_double(e.community_status) << ',' << format_double(grid)
            << ',' << format_double(neighbour) << ',' << format_double(wasted);
        for (const auto& a : e.agents) out << ',' << format_double(a.grid);
        for (const auto& a : e.agents) out << ',' << format_double(a.received_from_neighbours);
        out << '\n';
    }
}

void write_agents_csv(std::ostream& out, const RunReport& report)
{
    out << "episode,agent,epsilon";
    for (Action a : kAllActions) out << ',' << to_string(a);
    out << ",grid_kwh,neighbour_kwh,requested_kwh,sent_kwh,wasted_kwh,final_battery_kwh\n";
    for (const auto& e : report.episodes) {
        for (const auto& a : e.agents) {
            out << e.episode << ',' << a.agent_id << ',' << format_double(e.epsilon);
            for (int n : a.actions) out << ',' << n;
            out << ',' << format_double(a.grid) << ',' << format_double(a.received_from_neighbours) << ','
                << format_double(a.requested_from_neighbours) << ',' << format_double(a.sent_to_neighbours) << ','
                << format_double(a.wasted) << ',' << format_double(a.final_battery) << '\n';
        }
    }
}

void write_compare_csv(std::ostream& out, const Comparison& comparison)
{
    out << "strategy,episode,mean_community_status_kwh,sd_kwh,runs\n";
    for (const auto& r : comparison.rows) {
        out << to_string(r.strategy) << ',' << r.episode << ',' << format_double(r.mean) << ','
            << format_double(r.sd) << ',' << r.runs << '\n';
    }
}

void write_steps_header(std::ostream& out)
{
    out << "episode,slot,agent,consumed_kwh,generated_kwh,battery_delta_kwh,received_kwh,sent_kwh,grid_kwh,"
           "wasted_kwh,soc_kwh\n";
}

void write_steps_rows(std::ostream& out, int episode, std::span<const StepOutcome> outcomes)
{
    for (const auto& o : outcomes) {
        out << episode << ',' << o.slot << ',' << o.agent_id << ',' << format_double(o.consumed) << ','
            << format_double(o.generated) << ',' << format_double(o.battery_delta) << ','
            << format_double(o.received_from_neighbours) << ',' << format_double(o.sent_to_neighbours) << ','
            << format_double(o.drawn_from_grid) << ',' << format_double(o.wasted) << ','
            << format_double(o.soc_after) << '\n';
    }
}

RunReport run_to_directory(const ScenarioConfig& config, Strategy strategy, const std::filesystem::path& dir,
                           int episodes, int steps_from_episode)
{
    std::filesystem::create_directories(dir);
    std::ofstream steps(dir / "steps.csv");
    if (!steps) throw InvalidInput("cannot write into " + dir.string());
    write_steps_header(steps);
    RunOptions options;
    options.episodes = episodes;
    options.step_sink = [&](int episode, std::span<const StepOutcome> outcomes) {
        if (episode >= steps_from_episode) write_steps_rows(steps, episode, outcomes);
    };
    const RunReport report = run(config, strategy, options);

    std::ofstream report_csv(dir / "report.csv");
    write_report_csv(report_csv, report);
    std::ofstream agents_csv(dir / "agents.csv");
    write_agents_csv(agents_csv, report);
    std::ofstream config_txt(dir / "config.txt");
    config_txt << serialize_config(config);
    config_txt << "# strategy = " << to_string(strategy) << '\n';
    config_txt << "# episodes_run = " << report.episodes.size() << '\n';
    config_txt << "# digest = " << report.config_digest << '\n';
    return report;
}

}  // namespace zec::harness
