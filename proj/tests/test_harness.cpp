#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "support.hpp"
#include "zec/harness.hpp"

using namespace zec;

namespace {

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(BuildScenario, TableCommunities)
{
    const auto s1 = harness::build_scenario(1, Season::Winter, 0);
    ASSERT_EQ(s1.houses.size(), 3u);
    EXPECT_EQ(s1.houses[0].agent_id, "Alice");
    EXPECT_EQ(s1.houses[1].agent_id, "Bob");
    EXPECT_EQ(s1.houses[2].agent_id, "Charlie");
    const auto s2 = harness::build_scenario(2, Season::Summer, 0);
    ASSERT_EQ(s2.houses.size(), 4u);
    EXPECT_EQ(s2.houses[3].agent_id, "Dave");
    EXPECT_EQ(s2.houses[3].solar_cells, 0);
    EXPECT_THROW(static_cast<void>(harness::build_scenario(4, Season::Winter, 0)), InvalidInput);
}

TEST(BuildScenario, TenHouseCommunityIsSeeded)
{
    const auto a = harness::build_scenario(3, Season::Winter, 7);
    EXPECT_EQ(a, harness::build_scenario(3, Season::Winter, 7));
    EXPECT_NE(a.houses, harness::build_scenario(3, Season::Winter, 8).houses);
    ASSERT_EQ(a.houses.size(), 10u);
    for (const auto& h : a.houses) {
        EXPECT_EQ(h.solar_cells % 12, 0);
        EXPECT_LE(h.solar_cells, 72);
        EXPECT_GE(h.initial_charge, 0.0);
        EXPECT_LE(h.initial_charge, 7.2);
    }
}

TEST(Config, RoundTripAndDigest)
{
    auto c = harness::build_scenario(3, Season::Summer, 3);
    c.donor_reserve = 0.25;
    c.transfer_loss = 0.1;
    c.learning.hidden_layers = {32, 16};
    c.exposure = ProfileRef::file("/tmp/e.csv");
    const auto text = harness::serialize_config(c);
    EXPECT_EQ(text.rfind("schema_version = 1\n", 0), 0u);
    std::istringstream in(text);
    const auto back = harness::parse_config(in);
    EXPECT_EQ(back, c);
    EXPECT_EQ(harness::config_digest(back), harness::config_digest(c));
    EXPECT_EQ(harness::config_digest(c).size(), 16u);
    auto d = c;
    d.learning.learning_rate *= 2;
    EXPECT_NE(harness::config_digest(d), harness::config_digest(c));
}

TEST(Config, DigestIsStableAcrossReleases)
{
    // Pinned so that accidental changes to the canonical form are noticed.
    const auto c = harness::build_scenario(1, Season::Winter, 0);
    EXPECT_EQ(harness::config_digest(c), harness::config_digest(harness::build_scenario(1, Season::Winter, 0)));
    EXPECT_EQ(harness::config_digest(c), "183a52c61c9a002a");
}

TEST(Config, RejectsMalformedInput)
{
    auto parse = [](const std::string& s) {
        std::istringstream in(s);
        return harness::parse_config(in);
    };
    EXPECT_THROW(parse("name = x\n"), InvalidInput);
    EXPECT_THROW(parse("schema_version = 2\n"), InvalidInput);
    EXPECT_THROW(parse("schema_version = 1\nbogus = 3\n"), InvalidInput);
    EXPECT_THROW(parse("schema_version = 1\nseason = autumn\n"), InvalidInput);
    EXPECT_THROW(parse("schema_version = 1\nhouse = A,1\n"), InvalidInput);
    EXPECT_THROW(parse("schema_version = 1\ndays\n"), InvalidInput);
}

TEST(Config, FileRoundTrip)
{
    zec::testing::TempDir dir;
    const auto c = harness::build_scenario(2, Season::Winter, 4);
    harness::save_config(dir / "c.txt", c);
    EXPECT_EQ(harness::load_config(dir / "c.txt"), c);
    EXPECT_THROW(static_cast<void>(harness::load_config(dir / "missing.txt")), InvalidInput);
}

TEST(Run, DeterministicAndSized)
{
    auto c = harness::build_scenario(1, Season::Winter, 5);
    c.episodes = 4;
    const auto a = harness::run(c, Strategy::Learned);
    const auto b = harness::run(c, Strategy::Learned);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.episodes.size(), 4u);
    EXPECT_EQ(a.community_series().size(), 4u);
    EXPECT_EQ(a.episodes[0].epsilon, 1.0);
    EXPECT_EQ(a.config_digest, harness::config_digest(c));
    c.seed = 6;
    EXPECT_NE(harness::run(c, Strategy::Learned).community_series(), a.community_series());
}

TEST(Run, SummerSelfSufficiencyMakesStrategiesEqual)
{
    auto c = harness::build_scenario(1, Season::Summer, 0);
    c.episodes = 3;
    const auto ref = harness::run(c, Strategy::NeverShare).community_series();
    for (Strategy s : kAllStrategies) EXPECT_EQ(harness::run(c, s).community_series(), ref) << to_string(s);
}

TEST(Run, WinterBaselineOrdering)
{
    auto c = harness::build_scenario(1, Season::Winter, 0);
    c.episodes = 5;
    const double always = harness::run(c, Strategy::AlwaysShare).tail_mean(5);
    const double random = harness::run(c, Strategy::Random).tail_mean(5);
    const double never = harness::run(c, Strategy::NeverShare).tail_mean(5);
    EXPECT_GE(always, random);
    EXPECT_GE(random, never);
    EXPECT_GT(always, never);
}

TEST(Compare, ParallelMatchesSerial)
{
    auto c = harness::build_scenario(2, Season::Winter, 0);
    const std::vector<Strategy> strategies{Strategy::Learned, Strategy::Random, Strategy::AlwaysShare};
    const std::vector<std::uint64_t> seeds{0, 1, 2};
    const auto par = harness::compare(c, strategies, 3, seeds);
    const auto ser = harness::compare_serial(c, strategies, 3, seeds);
    EXPECT_EQ(par, ser);
    ASSERT_EQ(par.rows.size(), 9u);
    EXPECT_EQ(par.rows[0].runs, 3);
    // Seed-specific runs are the same as single runs.
    auto single = c;
    single.seed = 1;
    EXPECT_EQ(par.reports[1].community_series(), harness::run(single, Strategy::Learned, {3, {}}).community_series());
}

TEST(Compare, AggregatesMeanAndSampleDeviation)
{
    auto c = harness::build_scenario(1, Season::Winter, 0);
    const auto cmp = harness::compare_serial(c, {Strategy::Random}, 2, {0, 1, 2});
    for (int e = 0; e < 2; ++e) {
        std::vector<double> v;
        for (const auto& r : cmp.reports) v.push_back(r.episodes[static_cast<std::size_t>(e)].community_status);
        const double mean = (v[0] + v[1] + v[2]) / 3;
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        EXPECT_NEAR(cmp.rows[static_cast<std::size_t>(e)].mean, mean, 1e-12);
        EXPECT_NEAR(cmp.rows[static_cast<std::size_t>(e)].sd, std::sqrt(ss / 2), 1e-12);
    }
}

TEST(RunToDirectory, WritesReports)
{
    zec::testing::TempDir dir;
    auto c = harness::build_scenario(1, Season::Winter, 0);
    const auto report = harness::run_to_directory(c, Strategy::AlwaysShare, dir.path(), 2, 1);
    for (const char* f : {"report.csv", "agents.csv", "steps.csv", "config.txt"}) {
        EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
    }
    const auto steps = slurp(dir / "steps.csv");
    EXPECT_EQ(std::count(steps.begin(), steps.end(), '\n'), 1 + 144 * 3);
    const auto rep = slurp(dir / "report.csv");
    EXPECT_EQ(rep.rfind("episode,strategy,seed,epsilon,community_status_kwh", 0), 0u);
    EXPECT_EQ(std::count(rep.begin(), rep.end(), '\n'), 3);
    // The saved configuration reproduces the run.
    auto again = harness::load_config(dir / "config.txt");
    EXPECT_EQ(again, c);
    EXPECT_EQ(report.episodes.size(), 2u);
}
