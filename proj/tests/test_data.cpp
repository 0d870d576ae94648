#include <gtest/gtest.h>

#include <fstream>
#include <numeric>

#include "support.hpp"
#include "zec/data.hpp"

using namespace zec;
using zec::testing::TempDir;

namespace {

void write_lines(const std::filesystem::path& p, const std::string& header, const std::vector<std::string>& rows)
{
    std::ofstream out(p);
    out << header << '\n';
    for (const auto& r : rows) out << r << '\n';
}

}  // namespace

TEST(LoadConsumption, ZeroFile)
{
    TempDir dir;
    write_lines(dir / "z.csv", data::kConsumptionHeader, std::vector<std::string>(144, "0"));
    const auto p = data::load_consumption(dir / "z.csv", 3);
    EXPECT_EQ(p.days, 3);
    EXPECT_EQ(p.total(), 0.0);
}

TEST(LoadConsumption, ShortFileIsLengthMismatch)
{
    TempDir dir;
    write_lines(dir / "s.csv", data::kConsumptionHeader, std::vector<std::string>(143, "0.2"));
    try {
        static_cast<void>(data::load_consumption(dir / "s.csv", 3));
        FAIL() << "expected a length mismatch";
    } catch (const data::DataError& e) {
        EXPECT_EQ(e.kind(), data::DataError::Kind::LengthMismatch);
    }
    EXPECT_THROW(static_cast<void>(data::load_consumption(dir / "s.csv")), data::DataError);
}

TEST(LoadConsumption, NegativeAndGarbageCarryLineNumbers)
{
    TempDir dir;
    std::vector<std::string> rows(48, "0.1");
    rows[4] = "-0.1";
    write_lines(dir / "n.csv", data::kConsumptionHeader, rows);
    try {
        static_cast<void>(data::load_consumption(dir / "n.csv", 1));
        FAIL();
    } catch (const data::DataError& e) {
        EXPECT_EQ(e.kind(), data::DataError::Kind::NegativeValue);
        EXPECT_EQ(e.line(), 6u);
    }
    rows[4] = "0.1";
    rows[9] = "abc";
    write_lines(dir / "g.csv", data::kConsumptionHeader, rows);
    try {
        static_cast<void>(data::load_consumption(dir / "g.csv", 1));
        FAIL();
    } catch (const data::DataError& e) {
        EXPECT_EQ(e.kind(), data::DataError::Kind::Parse);
        EXPECT_EQ(e.line(), 11u);
    }
}

TEST(LoadConsumption, MissingFileAndWrongHeader)
{
    TempDir dir;
    try {
        static_cast<void>(data::load_consumption(dir / "absent.csv"));
        FAIL();
    } catch (const data::DataError& e) {
        EXPECT_EQ(e.kind(), data::DataError::Kind::Io);
    }
    write_lines(dir / "h.csv", "kwh", std::vector<std::string>(48, "0.1"));
    EXPECT_THROW(static_cast<void>(data::load_consumption(dir / "h.csv")), data::DataError);
}

TEST(Loaders, RoundTrip)
{
    TempDir dir;
    const auto p = data::synthesize_consumption(4, 9.49, 3);
    data::save_consumption(dir / "c.csv", p);
    const auto back = data::load_consumption(dir / "c.csv", 3);
    EXPECT_EQ(back.readings, p.readings);

    const auto e = data::synthesize_exposure(Season::Summer, 2);
    data::save_exposure(dir / "e.csv", e);
    EXPECT_EQ(data::load_exposure(dir / "e.csv", 2).readings, e.readings);
}

TEST(SynthesizeConsumption, DailySumsNearMean)
{
    const auto p = data::synthesize_consumption(1, 11.01, 3);
    ASSERT_EQ(p.readings.size(), 144u);
    for (double d : p.daily_totals()) {
        EXPECT_GE(d, 10.90);
        EXPECT_LE(d, 11.12);
    }
    for (double v : p.readings) EXPECT_GT(v, 0.0);
}

TEST(SynthesizeConsumption, SeedDeterminism)
{
    EXPECT_EQ(data::synthesize_consumption(1, 11.01, 3).readings,
              data::synthesize_consumption(1, 11.01, 3).readings);
    EXPECT_NE(data::synthesize_consumption(1, 11.01, 3).readings,
              data::synthesize_consumption(2, 11.01, 3).readings);
}

TEST(SynthesizeConsumption, EveningPeakAboveNight)
{
    const auto p = data::synthesize_consumption(3, 10.03, 1);
    double night = 0.0;
    double evening = 0.0;
    for (int s = 0; s < 8; ++s) night += p.readings[static_cast<std::size_t>(s)];
    for (int s = 34; s < 42; ++s) evening += p.readings[static_cast<std::size_t>(s)];
    EXPECT_GT(evening, night);
}

TEST(SynthesizeExposure, DailyTotalsAndNight)
{
    for (Season season : {Season::Winter, Season::Summer}) {
        const auto e = data::synthesize_exposure(season, 2);
        for (double d : e.daily_totals()) EXPECT_NEAR(d, data::season_daily_exposure(season), 1e-9);
        const auto [rise, set] = data::daylight_slots(season);
        for (int s = 0; s < kSlotsPerDay; ++s) {
            const double v = e.readings[static_cast<std::size_t>(s)];
            if (s < rise || s >= set) {
                EXPECT_EQ(v, 0.0);
            } else {
                EXPECT_GT(v, 0.0);
            }
        }
    }
    EXPECT_EQ(data::season_daily_exposure(Season::Summer), 18850.0);
}

TEST(GenerationFor, ClosedForm)
{
    EXPECT_EQ(data::generation_for(0, 500.0, 0.018), 0.0);
    EXPECT_EQ(data::generation_for(72, 0.0, 0.018), 0.0);
    const auto e = data::synthesize_exposure(Season::Summer, 1);
    double day = 0.0;
    for (double x : e.readings) day += data::generation_for(72, x, 0.018);
    EXPECT_NEAR(day, 72 * 0.018 * 18850 * 0.5 / 1000, 1e-9);
    EXPECT_NEAR(day, 12.21, 0.005);
    EXPECT_NEAR(data::generation_for(36, 400.0, 0.1) * 2, data::generation_for(72, 400.0, 0.1), 1e-15);
    EXPECT_THROW(static_cast<void>(data::generation_for(-1, 1.0, 0.1)), InvalidInput);
}
