#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "zec/domain.hpp"

namespace zec::data {

/// Raised by the loaders. `line()` is the 1-based line of the offending
/// record, or 0 when the problem is not tied to one line.
class DataError : public std::runtime_error {
public:
    enum class Kind { Io, Parse, LengthMismatch, NegativeValue };

    DataError(Kind kind, std::size_t line, const std::string& message);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] std::size_t line() const { return line_; }

private:
    Kind kind_;
    std::size_t line_;
};

/// Half-hourly household consumption, kWh per slot.
struct ConsumptionProfile {
    std::vector<Kwh> readings;
    int days = 0;

    [[nodiscard]] std::vector<Kwh> daily_totals() const;
    [[nodiscard]] Kwh total() const;
};

/// Half-hourly solar irradiance samples in W/m^2.
struct SolarExposureSeries {
    std::vector<double> readings;
    int days = 0;

    [[nodiscard]] std::vector<double> daily_totals() const;
};

inline constexpr const char* kConsumptionHeader = "kwh_per_half_hour";
inline constexpr const char* kExposureHeader = "w_per_m2_per_half_hour";

/// Reads a consumption file. With `expected_days` > 0 the file must hold
/// exactly 48 x days readings, otherwise any whole number of days.
ConsumptionProfile load_consumption(const std::filesystem::path& path, int expected_days = 0);
void save_consumption(const std::filesystem::path& path, const ConsumptionProfile& profile);

SolarExposureSeries load_exposure(const std::filesystem::path& path, int expected_days = 0);
void save_exposure(const std::filesystem::path& path, const SolarExposureSeries& series);

/// Seeded household load with a small overnight base, a morning peak and a
/// larger evening peak. Each day is rescaled to sum to `daily_mean_kwh`.
ConsumptionProfile synthesize_consumption(std::uint64_t seed, double daily_mean_kwh, int days);

/// Daily exposure totals (sum of half-hourly samples) for the two seasons.
double season_daily_exposure(Season season);

/// First and one-past-last daylight slot of the day.
std::pair<int, int> daylight_slots(Season season);

/// A clear-sky bell between sunrise and sunset whose samples sum to
/// `daily_total` every day. Night samples are exactly zero.
SolarExposureSeries synthesize_exposure(Season season, int days, double daily_total);
SolarExposureSeries synthesize_exposure(Season season, int days);

/// Energy produced in one half-hour slot:
/// cells x yield_factor x exposure x 0.5 h / 1000, in kWh.
Kwh generation_for(int cells, double exposure_w_per_m2, double yield_factor);

/// Resolves a house's consumption profile reference for the scenario horizon.
ConsumptionProfile resolve_consumption(const ProfileRef& ref, int days);

/// The scenario's exposure series: the file override when set, otherwise the
/// seasonal synthetic series.
SolarExposureSeries resolve_exposure(const ScenarioConfig& config);

}  // namespace zec::data
