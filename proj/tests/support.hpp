#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include "zec/data.hpp"
#include "zec/domain.hpp"

namespace zec::testing {

/// A scratch directory removed on destruction.
class TempDir {
public:
    TempDir()
    {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("zec-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const { return path_; }
    [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

// Flat exposure of 200 W/m^2 at yield 1 gives 0.1 kWh per cell per slot.
inline constexpr double kTestExposure = 200.0;
inline constexpr Kwh kKwhPerCell = 0.1;

struct HouseSpec {
    std::string id;
    std::vector<Kwh> consumption;  // 48 x days values
    int cells = 0;
    Kwh initial_charge = 0.0;
    Kwh capacity = 7.2;
};

/// A scenario whose houses see exactly the given consumption and a flat
/// generation of cells x 0.1 kWh in every slot.
inline ScenarioConfig file_scenario(const TempDir& dir, const std::vector<HouseSpec>& houses, int days = 1)
{
    ScenarioConfig config;
    config.name = "test";
    config.days = days;
    config.episodes = 1;
    config.yield_factor = 1.0;

    const std::vector<double> exposure(static_cast<std::size_t>(kSlotsPerDay * days), kTestExposure);
    data::save_exposure(dir / "exposure.csv", data::SolarExposureSeries{exposure, days});
    config.exposure = ProfileRef::file((dir / "exposure.csv").string());

    for (const auto& h : houses) {
        HouseConfig house;
        house.agent_id = h.id;
        house.solar_cells = h.cells;
        house.battery_unit_capacity = h.capacity;
        house.battery_units = 1;
        house.initial_charge = h.initial_charge;
        const auto file = dir / (h.id + ".csv");
        data::save_consumption(file, data::ConsumptionProfile{h.consumption, days});
        house.consumption = ProfileRef::file(file.string());
        config.houses.push_back(house);
    }
    config.validate();
    return config;
}

inline std::vector<Kwh> flat(Kwh kwh, int days = 1)
{
    return std::vector<Kwh>(static_cast<std::size_t>(kSlotsPerDay * days), kwh);
}

}  // namespace zec::testing
