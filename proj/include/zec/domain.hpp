#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace zec {

/// Energy in kilowatt-hours. Net balances may be negative; every other
/// quantity carried in this unit is non-negative.
using Kwh = double;

inline constexpr int kSlotsPerDay = 48;
inline constexpr int kDaysPerWeek = 7;
inline constexpr double kSlotHours = 0.5;

class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Throws InvalidInput when `value` is NaN or infinite.
void require_finite(double value, std::string_view what);

enum class EnergyLevel : std::uint8_t { None = 0, Low = 1, Medium = 2, High = 3 };

inline constexpr int kEnergyLevelCount = 4;

std::string_view to_string(EnergyLevel level);

// The five choices an energy user faces in a sharing community.
enum class Action : std::uint8_t {
    StoreExcess = 0,
    RequestNeighbour = 1,
    RequestGrid = 2,
    GrantRequest = 3,
    DenyRequest = 4,
};

inline constexpr int kActionCount = 5;
inline constexpr std::array<Action, kActionCount> kAllActions{
    Action::StoreExcess, Action::RequestNeighbour, Action::RequestGrid,
    Action::GrantRequest, Action::DenyRequest};

std::string_view to_string(Action action);
std::optional<Action> parse_action(std::string_view name);

/// Small ordered set of actions. Iteration follows the fixed enumeration
/// order, which is also the tie-breaking order for greedy selection.
class ActionSet {
public:
    constexpr ActionSet() = default;
    constexpr ActionSet(std::initializer_list<Action> actions)
    {
        for (Action a : actions) insert(a);
    }

    constexpr void insert(Action a) { bits_ |= bit(a); }
    constexpr void erase(Action a) { bits_ &= static_cast<std::uint8_t>(~bit(a)); }
    [[nodiscard]] constexpr bool contains(Action a) const { return (bits_ & bit(a)) != 0; }
    [[nodiscard]] constexpr bool empty() const { return bits_ == 0; }
    [[nodiscard]] int size() const;
    [[nodiscard]] std::vector<Action> to_vector() const;
    /// The n-th member in enumeration order; n < size().
    [[nodiscard]] Action at(int n) const;
    [[nodiscard]] constexpr std::uint8_t bits() const { return bits_; }

    friend constexpr bool operator==(ActionSet, ActionSet) = default;

private:
    static constexpr std::uint8_t bit(Action a)
    {
        return static_cast<std::uint8_t>(1u << static_cast<unsigned>(a));
    }
    std::uint8_t bits_ = 0;
};

std::string to_string(ActionSet set);

/// Upper edges of the None, Low and Medium bands in kWh per slot.
struct Thresholds {
    std::array<double, 3> edges{0.05, 0.5, 1.5};

    /// Throws InvalidInput unless the edges are finite, positive and strictly
    /// ascending.
    void validate() const;

    friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

/// Maps the magnitude of a balance onto four levels. Band edges belong to the
/// lower level: |b| <= e0 is None, e0 < |b| <= e1 Low, e1 < |b| <= e2 Medium,
/// anything larger High.
EnergyLevel discretize(Kwh balance, const Thresholds& thresholds);

/// A bank of identical lead-acid style units. The state of charge is kept in
/// [0, capacity()] by every mutator.
class BatteryBank {
public:
    static constexpr double kDefaultVolts = 12.0;
    static constexpr double kDefaultAmpHours = 100.0;
    static constexpr int kDefaultUnits = 6;

    /// 12 V x 100 Ah = 1.2 kWh.
    static constexpr Kwh default_unit_capacity() { return kDefaultVolts * kDefaultAmpHours / 1000.0; }

    BatteryBank() = default;
    BatteryBank(Kwh unit_capacity, int unit_count, Kwh soc = 0.0);

    [[nodiscard]] Kwh unit_capacity() const { return unit_capacity_; }
    [[nodiscard]] int unit_count() const { return unit_count_; }
    /// Summed in watt-hours so that 6 x 1.2 kWh is exactly 7.2 kWh.
    [[nodiscard]] Kwh capacity() const { return bank_capacity(unit_capacity_, unit_count_); }
    static Kwh bank_capacity(Kwh unit_capacity, int unit_count)
    {
        return unit_capacity * 1000.0 * unit_count / 1000.0;
    }
    [[nodiscard]] Kwh soc() const { return soc_; }
    [[nodiscard]] Kwh headroom() const { return capacity() - soc_; }

    void set_soc(Kwh soc);
    /// Stores up to `amount`; returns what was accepted.
    Kwh charge(Kwh amount);
    /// Releases up to `amount`; returns what was delivered.
    Kwh discharge(Kwh amount);

private:
    Kwh unit_capacity_ = default_unit_capacity();
    int unit_count_ = kDefaultUnits;
    Kwh soc_ = 0.0;
};

enum class Season : std::uint8_t { Winter, Summer };

std::string_view to_string(Season season);
std::optional<Season> parse_season(std::string_view name);

/// Where a house's consumption series comes from: either a seeded synthetic
/// profile with a target daily mean or a file on disk.
struct ProfileRef {
    enum class Kind : std::uint8_t { Synthetic, File };
    Kind kind = Kind::Synthetic;
    std::uint64_t seed = 1;
    double daily_mean_kwh = 10.0;
    std::string path;

    static ProfileRef synthetic(std::uint64_t seed, double daily_mean_kwh);
    static ProfileRef file(std::string path);

    /// "synthetic:<seed>:<daily_mean>" or "file:<path>".
    [[nodiscard]] std::string to_string() const;
    static ProfileRef parse(std::string_view text);

    friend bool operator==(const ProfileRef&, const ProfileRef&) = default;
};

struct HouseConfig {
    std::string agent_id;
    int solar_cells = 0;
    Kwh battery_unit_capacity = BatteryBank::default_unit_capacity();
    int battery_units = BatteryBank::kDefaultUnits;
    Kwh initial_charge = 0.0;
    ProfileRef consumption;

    [[nodiscard]] Kwh battery_capacity() const
    {
        return BatteryBank::bank_capacity(battery_unit_capacity, battery_units);
    }
    [[nodiscard]] BatteryBank make_battery() const;
    void validate() const;

    friend bool operator==(const HouseConfig&, const HouseConfig&) = default;
};

/// DQN hyper-parameters carried with a scenario.
struct LearningParams {
    double learning_rate = 0.125e-3;
    double discount = 0.99;
    int batch_size = 32;
    int replay_capacity = 10000;
    std::vector<int> hidden_layers{100, 100};

    void validate() const;
    friend bool operator==(const LearningParams&, const LearningParams&) = default;
};

struct ScenarioConfig {
    static constexpr int kSchemaVersion = 1;

    std::string name = "custom";
    std::vector<HouseConfig> houses;  // order is the settlement order
    Season season = Season::Winter;
    int days = 3;
    int episodes = 500;
    std::uint64_t seed = 0;
    Thresholds thresholds;
    double yield_factor = 0.1;   // m^2-equivalent per solar cell
    Kwh donor_reserve = 0.0;     // battery charge a donor keeps back
    double transfer_loss = 0.0;  // fraction lost on neighbour transfers
    std::optional<ProfileRef> exposure;  // file override for the solar series
    LearningParams learning;

    [[nodiscard]] int horizon() const { return days * kSlotsPerDay; }
    void validate() const;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Average daily consumption of the three reference houses.
double reference_daily_mean(int house_number, Season season);

/// The two reference communities: {three houses, three houses plus Dave}.
std::pair<ScenarioConfig, ScenarioConfig> table1_configs(Season season = Season::Winter);

/// Formats a double so that parsing it back yields the same value.
std::string format_double(double value);
double parse_double(std::string_view text, std::string_view what);

}  // namespace zec
