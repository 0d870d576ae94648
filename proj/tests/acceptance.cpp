// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any selected criterion fails.
//
//   zec_acceptance [--criterion N]... [--cli PATH]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "linearizability.hpp"
#include "support.hpp"
#include "zec/agent.hpp"
#include "zec/cms_http.hpp"
#include "zec/harness.hpp"

using namespace zec;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string g_cli;

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

const std::vector<std::uint64_t> kSeeds{0, 1, 2, 3, 4};

// 1. The CMS reward against a brute-force summation.
Verdict eq1_oracle()
{
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<int> agents(1, 20);
    std::uniform_real_distribution<double> energy(0.0, 10.0);
    double worst = 0.0;
    for (int set = 0; set < 1000; ++set) {
        cms::CommunityMonitor monitor;
        const int n = agents(rng);
        std::vector<double> consumed(static_cast<std::size_t>(n)), generated(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const auto id = "agent" + std::to_string(i);
            monitor.join(id);
            consumed[static_cast<std::size_t>(i)] = energy(rng);
            generated[static_cast<std::size_t>(i)] = energy(rng);
            monitor.post_status({id, set, consumed[static_cast<std::size_t>(i)], generated[static_cast<std::size_t>(i)]});
        }
        long double status = 0.0L;
        for (int i = n - 1; i >= 0; --i) {
            status += static_cast<long double>(consumed[static_cast<std::size_t>(i)]) -
                      static_cast<long double>(generated[static_cast<std::size_t>(i)]);
        }
        const double expect = static_cast<double>(-status);
        worst = std::max(worst, std::abs(monitor.global_reward(set) - expect));
    }
    return {worst <= 1e-9, "1000 report sets of 1-20 agents, max |reward - oracle| = " + fmt(worst) + " (tol 1e-9)"};
}

// 2. Per-slot rewards sum to the episode value.
Verdict telescoping()
{
    std::mt19937_64 rng(202);
    double worst = 0.0;
    for (int ep = 0; ep < 100; ++ep) {
        auto config = harness::build_scenario(1 + static_cast<int>(rng() % 3),
                                              rng() % 2 ? Season::Winter : Season::Summer, rng() % 1000);
        config.days = 1 + static_cast<int>(rng() % 3);
        Environment env(config);
        cms::CommunityMonitor monitor;
        for (const auto& h : config.houses) monitor.join(h.agent_id);
        drl::Rng run_rng(rng());
        const auto strategy = kAllStrategies[rng() % kAllStrategies.size()];
        std::unique_ptr<Policy> policy;
        if (strategy == Strategy::Learned) {
            policy = std::make_unique<LearnedPolicy>(config, run_rng);
        } else {
            policy = std::make_unique<BaselinePolicy>(strategy);
        }
        std::vector<Kwh> consumed(config.houses.size(), 0.0), supplied(config.houses.size(), 0.0);
        const auto report = run_episode(*policy, env, monitor, ep, 0.5, run_rng,
                                        [&](int, std::span<const StepOutcome> outs) {
                                            for (std::size_t i = 0; i < outs.size(); ++i) {
                                                consumed[i] += outs[i].consumed;
                                                supplied[i] += std::max(0.0, outs[i].renewable_supply());
                                            }
                                        });
        double episode_value = 0.0;
        for (std::size_t i = 0; i < consumed.size(); ++i) episode_value -= consumed[i] - supplied[i];
        const std::int64_t first = static_cast<std::int64_t>(ep) * env.horizon();
        const double from_cms = monitor.episode_reward(first, first + env.horizon() - 1);
        worst = std::max({worst, std::abs(report.community_status - episode_value),
                          std::abs(from_cms - episode_value)});
    }
    return {worst <= 1e-9, "100 random episodes, max |sum of slot rewards - episode value| = " + fmt(worst) +
                               " (tol 1e-9)"};
}

// 3. Energy balance per house and slot; transfers cancel per slot.
Verdict conservation()
{
    double worst_residual = 0.0, worst_transfer = 0.0;
    std::size_t outcomes = 0;
    for (int scenario = 1; scenario <= 3; ++scenario) {
        for (Season season : {Season::Winter, Season::Summer}) {
            for (Strategy s : kAllStrategies) {
                auto config = harness::build_scenario(scenario, season, 17);
                config.episodes = 3;
                harness::RunOptions options;
                options.step_sink = [&](int, std::span<const StepOutcome> outs) {
                    Kwh sent = 0.0, received = 0.0;
                    for (const auto& o : outs) {
                        worst_residual = std::max(worst_residual, std::abs(o.conservation_residual()));
                        sent += o.sent_to_neighbours;
                        received += o.received_from_neighbours;
                        ++outcomes;
                    }
                    worst_transfer = std::max(worst_transfer, std::abs(sent - received));
                };
                static_cast<void>(harness::run(config, s, options));
            }
        }
    }
    const bool pass = worst_residual <= 1e-9 && worst_transfer <= 1e-9;
    return {pass, std::to_string(outcomes) + " outcomes, max residual " + fmt(worst_residual) +
                      ", max transfer imbalance " + fmt(worst_transfer) + " (tol 1e-9)"};
}

// 4. Backprop against central differences of the squared error.
Verdict gradient_check()
{
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        std::vector<int> sizes{2 + static_cast<int>(rng() % 62)};
        const int hidden = 1 + static_cast<int>(rng() % 2);
        for (int h = 0; h < hidden; ++h) sizes.push_back(2 + static_cast<int>(rng() % 29));
        sizes.push_back(1);
        auto net = nn::QNetwork::glorot(sizes, rng);
        for (auto& L : net.layers()) {
            for (double& b : L.biases) b = 0.5 * u(rng);
        }
        std::vector<double> x(static_cast<std::size_t>(sizes[0]));
        for (double& v : x) v = (u(rng) + 1.0) / 2.0;
        const double target = 5.0 * u(rng);

        auto ws = net.make_workspace();
        auto grads = net.make_gradients();
        grads.zero();
        const double q = net.forward(x, ws);
        net.backward(x, 2.0 * (q - target), ws, grads);

        auto loss = [&] {
            const double d = net.forward(x) - target;
            return d * d;
        };
        const double h = 1e-5;
        double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
        for (std::size_t l = 0; l < net.layers().size(); ++l) {
            auto visit = [&](std::vector<double>& params, const std::vector<double>& analytic) {
                for (std::size_t k = 0; k < params.size(); ++k) {
                    const double keep = params[k];
                    params[k] = keep + h;
                    const double up = loss();
                    params[k] = keep - h;
                    const double down = loss();
                    params[k] = keep;
                    const double numeric = (up - down) / (2 * h);
                    diff2 += (analytic[k] - numeric) * (analytic[k] - numeric);
                    a2 += analytic[k] * analytic[k];
                    n2 += numeric * numeric;
                }
            };
            visit(net.layers()[l].weights, grads.layers[l].weights);
            visit(net.layers()[l].biases, grads.layers[l].biases);
        }
        const double rel = std::sqrt(diff2) / std::max(std::sqrt(a2) + std::sqrt(n2), 1e-300);
        worst = std::max(worst, rel);
    }
    return {worst < 1e-4, "50 random (network, input, target) triples, max relative error " + fmt(worst) +
                              " (tol 1e-4)"};
}

// 5. Every mini-batch holds the newest transition.
Verdict combined_replay()
{
    std::mt19937_64 rng(505);
    int calls = 0, missing = 0;
    while (calls < 10000) {
        drl::ReplayBuffer buffer(1 + rng() % 200);
        const int pushes = 1 + static_cast<int>(rng() % 400);
        for (int p = 0; p < pushes && calls < 10000; ++p) {
            drl::Transition t;
            t.reward = static_cast<double>(calls * 1000 + p);
            t.terminal = rng() % 2 == 0;
            t.next_legal = {Action::StoreExcess};
            buffer.push(t);
            if (rng() % 3 != 0) continue;
            const auto batch = buffer.sample_combined(1 + static_cast<int>(rng() % 64), rng);
            ++calls;
            const bool has_latest = std::any_of(batch.begin(), batch.end(), [&](std::size_t i) {
                return buffer.at(i).reward == t.reward;
            });
            if (!has_latest) ++missing;
        }
    }
    return {missing == 0, std::to_string(calls) + " sample calls, " + std::to_string(missing) +
                              " batches without the latest transition"};
}

// 6. ε is 0.8^k over the k-th tenth of training, then 0.
Verdict epsilon_schedule()
{
    const int total = 500;
    const drl::EpsilonSchedule schedule(total);
    int wrong = 0;
    double drift = 0.0;
    for (int k = 0; k < 10; ++k) {
        double repeated = 1.0;
        for (int j = 0; j < k; ++j) repeated *= 0.8;
        for (int e = k * total / 10; e < (k + 1) * total / 10; ++e) {
            if (schedule(e) != std::pow(0.8, k)) ++wrong;
            drift = std::max(drift, std::abs(schedule(e) - repeated));
        }
    }
    for (int e : {500, 501, 1000}) {
        if (schedule(e) != 0.0) ++wrong;
    }
    if (drl::EpsilonSchedule::exploitation() != 0.0) ++wrong;
    return {wrong == 0 && drift <= 1e-15, "E=500: " + std::to_string(wrong) +
                                              " mismatches against 0.8^k, max deviation from repeated "
                                              "multiplication " + fmt(drift) + ", exploitation = 0"};
}

// 7. Summer Scenario 1 is self-sufficient: all strategies coincide.
Verdict summer_equivalence()
{
    const auto config = harness::build_scenario(1, Season::Summer, 0);
    std::vector<std::vector<double>> series;
    for (Strategy s : kAllStrategies) series.push_back(harness::run(config, s).community_series());
    bool equal = true;
    for (const auto& s : series) equal = equal && s == series.front();
    std::size_t deficit_free = 0;
    for (double v : series.front()) deficit_free += v == 0.0 ? 1 : 0;
    return {equal, std::to_string(config.episodes) + " episodes x 4 strategies, series identical: " +
                       (equal ? "yes" : "no") + ", episode status " + fmt(series.front().front()) + " kWh"};
}

// 8. Learned closes at least half the gap between Never and Always Share.
Verdict learning_efficacy()
{
    const auto config = harness::build_scenario(1, Season::Winter, 0);
    const std::vector<Strategy> strategies{Strategy::Learned, Strategy::AlwaysShare, Strategy::NeverShare};
    const auto t0 = std::chrono::steady_clock::now();
    const auto cmp = harness::compare(config, strategies, config.episodes, kSeeds);
    const double minutes =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;
    int wins = 0;
    std::string per_seed;
    for (std::size_t k = 0; k < kSeeds.size(); ++k) {
        const double learned = cmp.reports[0 * kSeeds.size() + k].tail_mean(10);
        const double always = cmp.reports[1 * kSeeds.size() + k].tail_mean(10);
        const double never = cmp.reports[2 * kSeeds.size() + k].tail_mean(10);
        const double bar = never + 0.5 * (always - never);
        if (learned >= bar) ++wins;
        per_seed += " seed" + std::to_string(kSeeds[k]) + ": " + fmt(learned) + (learned >= bar ? ">=" : "<") +
                    fmt(bar);
    }
    return {wins >= 4, std::to_string(wins) + "/5 seeds reach Never + 0.5(Always - Never) over the last 10 of " +
                           std::to_string(config.episodes) + " episodes (need 4);" + per_seed + "; " +
                           fmt(minutes) + " min"};
}

// 9. The house without panels prefers its neighbours over the grid.
Verdict zero_generation_house()
{
    const auto config = harness::build_scenario(2, Season::Winter, 0);
    const auto cmp = harness::compare(config, {Strategy::Learned}, config.episodes, kSeeds);
    int wins = 0;
    std::string per_seed;
    for (std::size_t k = 0; k < kSeeds.size(); ++k) {
        const auto& episodes = cmp.reports[k].episodes;
        double requested = 0.0, grid = 0.0;
        for (std::size_t e = episodes.size() - 10; e < episodes.size(); ++e) {
            const auto& dave = episodes[e].agents.back();
            requested += dave.requested_from_neighbours;
            grid += dave.grid;
        }
        if (requested > grid) ++wins;
        per_seed += " seed" + std::to_string(kSeeds[k]) + ": requested " + fmt(requested) + " vs grid " + fmt(grid);
    }
    return {wins >= 3, std::to_string(wins) + "/5 seeds with Dave's neighbour requests above grid draw over the "
                                              "last 10 episodes (need 3);" + per_seed};
}

// 10. Always >= Random >= Never on cumulative winter status.
Verdict baseline_ordering()
{
    const auto config = harness::build_scenario(1, Season::Winter, 0);
    const std::vector<Strategy> strategies{Strategy::AlwaysShare, Strategy::Random, Strategy::NeverShare};
    const auto cmp = harness::compare(config, strategies, config.episodes, kSeeds);
    int ordered = 0;
    std::string per_seed;
    for (std::size_t k = 0; k < kSeeds.size(); ++k) {
        auto total = [&](std::size_t s) {
            const auto v = cmp.reports[s * kSeeds.size() + k].community_series();
            return std::accumulate(v.begin(), v.end(), 0.0);
        };
        const double a = total(0), r = total(1), n = total(2);
        if (a >= r && r >= n) ++ordered;
        per_seed += " seed" + std::to_string(kSeeds[k]) + ": " + fmt(a) + " / " + fmt(r) + " / " + fmt(n);
    }
    return {ordered == 5, std::to_string(ordered) + "/5 seeds ordered Always >= Random >= Never (cumulative kWh)" +
                              per_seed};
}

// 11. Membership is linearizable; HTTP and in-process status agree.
Verdict cms_conformance()
{
    int bad_local = 0, bad_remote = 0;
    for (std::uint64_t round = 0; round < 200; ++round) {
        cms::CommunityMonitor monitor;
        std::vector<cms::CommunityService*> clients(4, &monitor);
        if (!zec::testing::MembershipHistoryChecker(zec::testing::record_membership_history(clients, 4, round))
                 .linearizable()) {
            ++bad_local;
        }
    }
    for (std::uint64_t round = 0; round < 30; ++round) {
        cms::CommunityMonitor monitor;
        cms::CmsHttpServer server(monitor);
        const int port = server.start();
        std::vector<std::unique_ptr<cms::RemoteCommunityService>> owned;
        std::vector<cms::CommunityService*> clients;
        for (int t = 0; t < 3; ++t) {
            owned.push_back(std::make_unique<cms::RemoteCommunityService>("127.0.0.1", port));
            clients.push_back(owned.back().get());
        }
        if (!zec::testing::MembershipHistoryChecker(
                 zec::testing::record_membership_history(clients, 4, 1000 + round))
                 .linearizable()) {
            ++bad_remote;
        }
        owned.clear();
        server.stop();
    }

    // Replay one simulated report stream into both modes.
    auto config = harness::build_scenario(3, Season::Winter, 5);
    config.episodes = 2;
    std::vector<cms::StatusReport> stream;
    harness::RunOptions options;
    options.step_sink = [&](int episode, std::span<const StepOutcome> outs) {
        for (const auto& o : outs) {
            stream.push_back({o.agent_id, static_cast<std::int64_t>(episode) * 144 + o.slot, o.consumed,
                              std::max(0.0, o.renewable_supply())});
        }
    };
    static_cast<void>(harness::run(config, Strategy::Random, options));
    cms::CommunityMonitor local;
    cms::CommunityMonitor backing;
    cms::CmsHttpServer server(backing);
    auto remote_owner = std::make_unique<cms::RemoteCommunityService>("127.0.0.1", server.start());
    auto& remote = *remote_owner;
    for (const auto& h : config.houses) {
        local.join(h.agent_id);
        remote.join(h.agent_id);
    }
    int mismatched = 0, slots = 0;
    std::int64_t current = stream.front().slot;
    auto compare_slot = [&](std::int64_t slot) {
        ++slots;
        if (local.community_status(slot) != remote.community_status(slot) ||
            local.global_reward(slot) != remote.global_reward(slot)) {
            ++mismatched;
        }
    };
    for (const auto& r : stream) {
        if (r.slot != current) {
            compare_slot(current);
            current = r.slot;
        }
        local.post_status(r);
        remote.post_status(r);
    }
    compare_slot(current);
    const double local_total = local.episode_reward(0, current);
    const double remote_total = remote.episode_reward(0, current);
    if (local_total != remote_total) ++mismatched;
    remote_owner.reset();
    server.stop();

    const bool pass = bad_local == 0 && bad_remote == 0 && mismatched == 0;
    return {pass, "non-linearizable histories: " + std::to_string(bad_local) + "/200 in-process, " +
                      std::to_string(bad_remote) + "/30 over HTTP; " + std::to_string(slots) +
                      " slots replayed, " + std::to_string(mismatched) + " status mismatches"};
}

std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 12. Repeated CLI runs give byte-identical report.csv.
Verdict determinism()
{
    if (g_cli.empty()) return {false, "no CLI path given (--cli)"};
    zec::testing::TempDir dir;
    const std::vector<std::string> flag_sets{
        "run --scenario 1 --season winter --strategy learned --episodes 8 --seed 3",
        "run --scenario 2 --season summer --strategy random --episodes 6 --seed 11",
        "run --scenario 3 --season winter --strategy always --episodes 3 --seed 7",
    };
    int identical = 0;
    for (std::size_t i = 0; i < flag_sets.size(); ++i) {
        std::vector<std::string> reports;
        for (int rep = 0; rep < 2; ++rep) {
            const auto out = dir / ("run" + std::to_string(i) + "_" + std::to_string(rep));
            const std::string cmd = "\"" + g_cli + "\" " + flag_sets[i] + " --out \"" + out.string() + "\" > /dev/null";
            if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + cmd};
            reports.push_back(read_file(out / "report.csv"));
        }
        if (!reports[0].empty() && reports[0] == reports[1]) ++identical;
    }
    return {identical == static_cast<int>(flag_sets.size()),
            std::to_string(identical) + "/" + std::to_string(flag_sets.size()) +
                " flag sets gave byte-identical report.csv on repeat"};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> check;
};

}  // namespace

int main(int argc, char** argv)
{
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            selected.push_back(std::atoi(argv[++i]));
        } else if (arg == "--cli" && i + 1 < argc) {
            g_cli = argv[++i];
        } else {
            std::cerr << "usage: zec_acceptance [--criterion N]... [--cli PATH]\n";
            return 2;
        }
    }

    const std::vector<Criterion> criteria{
        {1, "global reward oracle", eq1_oracle},
        {2, "telescoping reward", telescoping},
        {3, "energy conservation", conservation},
        {4, "gradient check", gradient_check},
        {5, "combined experience replay", combined_replay},
        {6, "epsilon schedule", epsilon_schedule},
        {7, "summer self-sufficiency equivalence", summer_equivalence},
        {8, "learning efficacy", learning_efficacy},
        {9, "zero-generation house", zero_generation_house},
        {10, "baseline ordering", baseline_ordering},
        {11, "CMS service conformance", cms_conformance},
        {12, "run determinism", determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        if (!v.pass) ++failures;
        std::cout << (v.pass ? "PASS" : "FAIL") << "  criterion " << c.id << " (" << c.name << "): " << v.detail
                  << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
