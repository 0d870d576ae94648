#include "zec/domain.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <sstream>

namespace zec {

void require_finite(double value, std::string_view what)
{
    if (!std::isfinite(value)) {
        throw InvalidInput(std::string(what) + " must be finite");
    }
}

std::string_view to_string(EnergyLevel level)
{
    switch (level) {
    case EnergyLevel::None: return "none";
    case EnergyLevel::Low: return "low";
    case EnergyLevel::Medium: return "medium";
    case EnergyLevel::High: return "high";
    }
    return "?";
}

std::string_view to_string(Action action)
{
    switch (action) {
    case Action::StoreExcess: return "store_excess";
    case Action::RequestNeighbour: return "request_neighbour";
    case Action::RequestGrid: return "request_grid";
    case Action::GrantRequest: return "grant_request";
    case Action::DenyRequest: return "deny_request";
    }
    return "?";
}

std::optional<Action> parse_action(std::string_view name)
{
    for (Action a : kAllActions) {
        if (to_string(a) == name) return a;
    }
    return std::nullopt;
}

int ActionSet::size() const
{
    return std::popcount(bits_);
}

std::vector<Action> ActionSet::to_vector() const
{
    std::vector<Action> out;
    for (Action a : kAllActions) {
        if (contains(a)) out.push_back(a);
    }
    return out;
}

Action ActionSet::at(int n) const
{
    for (Action a : kAllActions) {
        if (contains(a) && n-- == 0) return a;
    }
    throw std::out_of_range("ActionSet::at");
}

std::string to_string(ActionSet set)
{
    std::string out = "{";
    for (Action a : set.to_vector()) {
        if (out.size() > 1) out += ",";
        out += to_string(a);
    }
    return out + "}";
}

void Thresholds::validate() const
{
    for (std::size_t i = 0; i < edges.size(); ++i) {
        require_finite(edges[i], "threshold");
        if (edges[i] <= 0.0) throw InvalidInput("thresholds must be positive");
        if (i > 0 && edges[i] <= edges[i - 1]) {
            throw InvalidInput("thresholds must be strictly ascending");
        }
    }
}

EnergyLevel discretize(Kwh balance, const Thresholds& thresholds)
{
    require_finite(balance, "balance");
    const double magnitude = std::abs(balance);
    if (magnitude <= thresholds.edges[0]) return EnergyLevel::None;
    if (magnitude <= thresholds.edges[1]) return EnergyLevel::Low;
    if (magnitude <= thresholds.edges[2]) return EnergyLevel::Medium;
    return EnergyLevel::High;
}

BatteryBank::BatteryBank(Kwh unit_capacity, int unit_count, Kwh soc)
    : unit_capacity_(unit_capacity), unit_count_(unit_count)
{
    require_finite(unit_capacity, "battery unit capacity");
    if (unit_capacity <= 0.0) throw InvalidInput("battery unit capacity must be positive");
    if (unit_count <= 0) throw InvalidInput("battery unit count must be positive");
    set_soc(soc);
}

void BatteryBank::set_soc(Kwh soc)
{
    require_finite(soc, "state of charge");
    if (soc < 0.0 || soc > capacity()) {
        throw InvalidInput("state of charge outside [0, capacity]");
    }
    soc_ = soc;
}

Kwh BatteryBank::charge(Kwh amount)
{
    require_finite(amount, "charge amount");
    if (amount < 0.0) throw InvalidInput("charge amount must be non-negative");
    const Kwh accepted = std::min(amount, headroom());
    soc_ = std::min(capacity(), soc_ + accepted);
    return accepted;
}

Kwh BatteryBank::discharge(Kwh amount)
{
    require_finite(amount, "discharge amount");
    if (amount < 0.0) throw InvalidInput("discharge amount must be non-negative");
    const Kwh delivered = std::min(amount, soc_);
    soc_ = std::max(0.0, soc_ - delivered);
    return delivered;
}

std::string_view to_string(Season season)
{
    return season == Season::Winter ? "winter" : "summer";
}

std::optional<Season> parse_season(std::string_view name)
{
    if (name == "winter") return Season::Winter;
    if (name == "summer") return Season::Summer;
    return std::nullopt;
}

ProfileRef ProfileRef::synthetic(std::uint64_t seed, double daily_mean_kwh)
{
    ProfileRef ref;
    ref.kind = Kind::Synthetic;
    ref.seed = seed;
    ref.daily_mean_kwh = daily_mean_kwh;
    return ref;
}

ProfileRef ProfileRef::file(std::string path)
{
    ProfileRef ref;
    ref.kind = Kind::File;
    ref.path = std::move(path);
    ref.seed = 0;
    ref.daily_mean_kwh = 0.0;
    return ref;
}

std::string ProfileRef::to_string() const
{
    if (kind == Kind::File) return "file:" + path;
    return "synthetic:" + std::to_string(seed) + ":" + format_double(daily_mean_kwh);
}

ProfileRef ProfileRef::parse(std::string_view text)
{
    if (text.starts_with("file:")) {
        auto path = text.substr(5);
        if (path.empty()) throw InvalidInput("profile file reference has no path");
        return file(std::string(path));
    }
    if (text.starts_with("synthetic:")) {
        auto rest = text.substr(10);
        const auto colon = rest.find(':');
        if (colon == std::string_view::npos) {
            throw InvalidInput("synthetic profile reference needs <seed>:<daily_mean>");
        }
        std::uint64_t seed = 0;
        auto seed_text = rest.substr(0, colon);
        auto [ptr, ec] = std::from_chars(seed_text.data(), seed_text.data() + seed_text.size(), seed);
        if (ec != std::errc{} || ptr != seed_text.data() + seed_text.size()) {
            throw InvalidInput("bad profile seed: " + std::string(seed_text));
        }
        return synthetic(seed, parse_double(rest.substr(colon + 1), "daily mean"));
    }
    throw InvalidInput("unknown profile reference: " + std::string(text));
}

BatteryBank HouseConfig::make_battery() const
{
    return BatteryBank(battery_unit_capacity, battery_units, initial_charge);
}

void HouseConfig::validate() const
{
    if (agent_id.empty()) throw InvalidInput("house agent id is empty");
    if (agent_id.find_first_of(",= \t\n/") != std::string::npos) {
        throw InvalidInput("house agent id contains a reserved character: " + agent_id);
    }
    if (solar_cells < 0) throw InvalidInput("solar cells must be non-negative");
    require_finite(initial_charge, "initial charge");
    static_cast<void>(make_battery());  // validates capacity and initial charge bounds
    if (consumption.kind == ProfileRef::Kind::Synthetic && !(consumption.daily_mean_kwh > 0.0)) {
        throw InvalidInput("synthetic daily mean must be positive");
    }
}

void LearningParams::validate() const
{
    require_finite(learning_rate, "learning rate");
    require_finite(discount, "discount");
    if (learning_rate <= 0.0) throw InvalidInput("learning rate must be positive");
    if (discount < 0.0 || discount > 1.0) throw InvalidInput("discount must be in [0, 1]");
    if (batch_size < 1) throw InvalidInput("batch size must be positive");
    if (replay_capacity < 1) throw InvalidInput("replay capacity must be positive");
    if (hidden_layers.empty()) throw InvalidInput("at least one hidden layer is required");
    for (int width : hidden_layers) {
        if (width < 1) throw InvalidInput("hidden layer widths must be positive");
    }
}

void ScenarioConfig::validate() const
{
    if (houses.empty()) throw InvalidInput("scenario has no houses");
    for (const auto& h : houses) h.validate();
    for (std::size_t i = 0; i < houses.size(); ++i) {
        for (std::size_t j = i + 1; j < houses.size(); ++j) {
            if (houses[i].agent_id == houses[j].agent_id) {
                throw InvalidInput("duplicate agent id: " + houses[i].agent_id);
            }
        }
    }
    if (days < 1) throw InvalidInput("days must be >= 1");
    if (episodes < 1) throw InvalidInput("episodes must be >= 1");
    thresholds.validate();
    require_finite(yield_factor, "yield factor");
    if (yield_factor < 0.0) throw InvalidInput("yield factor must be non-negative");
    require_finite(donor_reserve, "donor reserve");
    if (donor_reserve < 0.0) throw InvalidInput("donor reserve must be non-negative");
    require_finite(transfer_loss, "transfer loss");
    if (transfer_loss < 0.0 || transfer_loss >= 1.0) {
        throw InvalidInput("transfer loss must be in [0, 1)");
    }
    learning.validate();
}

double reference_daily_mean(int house_number, Season season)
{
    // Daily averages of the three measured households; house 4 reuses house 1.
    static constexpr std::array<double, 3> kWinter{11.01, 9.49, 10.03};
    static constexpr std::array<double, 3> kSummer{12.12, 11.68, 8.27};
    if (house_number == 4) house_number = 1;
    if (house_number < 1 || house_number > 3) {
        throw InvalidInput("reference house number must be 1..4");
    }
    const auto& table = season == Season::Winter ? kWinter : kSummer;
    return table[static_cast<std::size_t>(house_number - 1)];
}

namespace {

HouseConfig table1_house(int number, Season season)
{
    struct Row {
        const char* name;
        int cells;
        double init;
    };
    static constexpr std::array<Row, 4> kRows{{
        {"Alice", 72, 7.2},
        {"Bob", 54, 2.5},
        {"Charlie", 12, 5.0},
        {"Dave", 0, 0.0},
    }};
    const Row& row = kRows[static_cast<std::size_t>(number - 1)];
    HouseConfig house;
    house.agent_id = row.name;
    house.solar_cells = row.cells;
    house.initial_charge = row.init;
    // Dave shares House 1's dataset, so the same profile seed is reused.
    const int profile_house = number == 4 ? 1 : number;
    house.consumption = ProfileRef::synthetic(static_cast<std::uint64_t>(profile_house),
                                              reference_daily_mean(profile_house, season));
    return house;
}

}  // namespace

std::pair<ScenarioConfig, ScenarioConfig> table1_configs(Season season)
{
    ScenarioConfig three;
    three.name = "scenario1";
    three.season = season;
    for (int n = 1; n <= 3; ++n) three.houses.push_back(table1_house(n, season));

    ScenarioConfig four = three;
    four.name = "scenario2";
    four.houses.push_back(table1_house(4, season));
    return {three, four};
}

std::string format_double(double value)
{
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf.data(), ptr);
}

double parse_double(std::string_view text, std::string_view what)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
        text.remove_suffix(1);
    }
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw InvalidInput("cannot parse " + std::string(what) + ": '" + std::string(text) + "'");
    }
    require_finite(value, what);
    return value;
}

}  // namespace zec
