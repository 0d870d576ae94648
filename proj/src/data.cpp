#include "zec/data.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace zec::data {

DataError::DataError(Kind kind, std::size_t line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      kind_(kind),
      line_(line)
{
}

namespace {

std::vector<double> per_day_sums(const std::vector<double>& readings)
{
    std::vector<double> out(readings.size() / kSlotsPerDay, 0.0);
    for (std::size_t i = 0; i < out.size() * kSlotsPerDay; ++i) {
        out[i / kSlotsPerDay] += readings[i];
    }
    return out;
}

std::vector<double> load_series(const std::filesystem::path& path, const char* header, int expected_days)
{
    std::ifstream in(path);
    if (!in) throw DataError(DataError::Kind::Io, 0, "cannot open " + path.string());

    std::string line;
    std::size_t line_no = 0;
    bool seen_header = false;
    std::vector<double> values;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!seen_header) {
            if (line != header) {
                throw DataError(DataError::Kind::Parse, line_no,
                                "expected header '" + std::string(header) + "', got '" + line + "'");
            }
            seen_header = true;
            continue;
        }
        double v = 0.0;
        try {
            v = parse_double(line, "reading");
        } catch (const InvalidInput& e) {
            throw DataError(DataError::Kind::Parse, line_no, e.what());
        }
        if (v < 0.0) throw DataError(DataError::Kind::NegativeValue, line_no, "negative reading " + line);
        values.push_back(v);
    }
    if (!seen_header) throw DataError(DataError::Kind::Parse, 0, "missing header in " + path.string());

    if (expected_days > 0) {
        const auto want = static_cast<std::size_t>(expected_days) * kSlotsPerDay;
        if (values.size() != want) {
            throw DataError(DataError::Kind::LengthMismatch, 0,
                            "expected " + std::to_string(want) + " readings, found " +
                                std::to_string(values.size()));
        }
    } else if (values.empty() || values.size() % kSlotsPerDay != 0) {
        throw DataError(DataError::Kind::LengthMismatch, 0,
                        std::to_string(values.size()) + " readings is not a whole number of days");
    }
    return values;
}

void save_series(const std::filesystem::path& path, const char* header, const std::vector<double>& values)
{
    std::ofstream out(path);
    if (!out) throw DataError(DataError::Kind::Io, 0, "cannot write " + path.string());
    out << header << '\n';
    for (double v : values) out << format_double(v) << '\n';
    if (!out) throw DataError(DataError::Kind::Io, 0, "write failed for " + path.string());
}

double bump(double slot, double centre, double width)
{
    const double z = (slot - centre) / width;
    return std::exp(-0.5 * z * z);
}

}  // namespace

std::vector<Kwh> ConsumptionProfile::daily_totals() const
{
    return per_day_sums(readings);
}

Kwh ConsumptionProfile::total() const
{
    return std::accumulate(readings.begin(), readings.end(), 0.0);
}

std::vector<double> SolarExposureSeries::daily_totals() const
{
    return per_day_sums(readings);
}

ConsumptionProfile load_consumption(const std::filesystem::path& path, int expected_days)
{
    ConsumptionProfile p;
    p.readings = load_series(path, kConsumptionHeader, expected_days);
    p.days = static_cast<int>(p.readings.size() / kSlotsPerDay);
    return p;
}

void save_consumption(const std::filesystem::path& path, const ConsumptionProfile& profile)
{
    save_series(path, kConsumptionHeader, profile.readings);
}

SolarExposureSeries load_exposure(const std::filesystem::path& path, int expected_days)
{
    SolarExposureSeries s;
    s.readings = load_series(path, kExposureHeader, expected_days);
    s.days = static_cast<int>(s.readings.size() / kSlotsPerDay);
    return s;
}

void save_exposure(const std::filesystem::path& path, const SolarExposureSeries& series)
{
    save_series(path, kExposureHeader, series.readings);
}

ConsumptionProfile synthesize_consumption(std::uint64_t seed, double daily_mean_kwh, int days)
{
    require_finite(daily_mean_kwh, "daily mean");
    if (daily_mean_kwh <= 0.0) throw InvalidInput("daily mean must be positive");
    if (days < 1) throw InvalidInput("days must be >= 1");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-1.0, 1.0);
    std::uniform_real_distribution<double> noise(0.8, 1.2);

    ConsumptionProfile p;
    p.days = days;
    p.readings.reserve(static_cast<std::size_t>(days) * kSlotsPerDay);
    for (int d = 0; d < days; ++d) {
        // Peak times wander by up to an hour, peak heights by 20%.
        const double morning_at = 14.0 + 2.0 * jitter(rng);
        const double evening_at = 37.0 + 2.0 * jitter(rng);
        const double morning_height = 1.6 * noise(rng);
        const double evening_height = 2.4 * noise(rng);
        std::vector<double> day(kSlotsPerDay);
        double sum = 0.0;
        for (int s = 0; s < kSlotsPerDay; ++s) {
            const double t = s;
            const double base = t < 12.0 ? 0.35 : 0.6;  // sleep hours draw less
            const double shape = base + morning_height * bump(t, morning_at, 2.0) +
                                 evening_height * bump(t, evening_at, 3.5) + 0.5 * bump(t, 26.0, 4.0);
            day[static_cast<std::size_t>(s)] = shape * noise(rng);
            sum += day[static_cast<std::size_t>(s)];
        }
        for (double v : day) p.readings.push_back(v * daily_mean_kwh / sum);
    }
    return p;
}

double season_daily_exposure(Season season)
{
    return season == Season::Winter ? 11770.0 : 18850.0;
}

std::pair<int, int> daylight_slots(Season season)
{
    // Toronto: roughly 07:30-16:30 in winter, 05:30-20:30 in summer.
    return season == Season::Winter ? std::pair{15, 33} : std::pair{11, 41};
}

SolarExposureSeries synthesize_exposure(Season season, int days, double daily_total)
{
    require_finite(daily_total, "daily exposure");
    if (daily_total < 0.0) throw InvalidInput("daily exposure must be non-negative");
    if (days < 1) throw InvalidInput("days must be >= 1");

    const auto [rise, set] = daylight_slots(season);
    std::vector<double> day(kSlotsPerDay, 0.0);
    double sum = 0.0;
    for (int s = rise; s < set; ++s) {
        // Sample the half-sine at the slot midpoint so both ends stay positive.
        const double phase = (s - rise + 0.5) / static_cast<double>(set - rise);
        day[static_cast<std::size_t>(s)] = std::sin(std::numbers::pi * phase);
        sum += day[static_cast<std::size_t>(s)];
    }
    for (double& v : day) v *= daily_total / sum;

    SolarExposureSeries series;
    series.days = days;
    for (int d = 0; d < days; ++d) series.readings.insert(series.readings.end(), day.begin(), day.end());
    return series;
}

SolarExposureSeries synthesize_exposure(Season season, int days)
{
    return synthesize_exposure(season, days, season_daily_exposure(season));
}

Kwh generation_for(int cells, double exposure_w_per_m2, double yield_factor)
{
    if (cells < 0) throw InvalidInput("cells must be non-negative");
    require_finite(exposure_w_per_m2, "exposure");
    if (exposure_w_per_m2 < 0.0) throw InvalidInput("exposure must be non-negative");
    return cells * yield_factor * exposure_w_per_m2 * kSlotHours / 1000.0;
}

ConsumptionProfile resolve_consumption(const ProfileRef& ref, int days)
{
    if (ref.kind == ProfileRef::Kind::File) return load_consumption(ref.path, days);
    return synthesize_consumption(ref.seed, ref.daily_mean_kwh, days);
}

SolarExposureSeries resolve_exposure(const ScenarioConfig& config)
{
    if (config.exposure && config.exposure->kind == ProfileRef::Kind::File) {
        return load_exposure(config.exposure->path, config.days);
    }
    return synthesize_exposure(config.season, config.days);
}

}  // namespace zec::data
