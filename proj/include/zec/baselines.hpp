#pragma once

#include <optional>
#include <string_view>

#include "zec/domain.hpp"
#include "zec/drl.hpp"

namespace zec {

enum class Strategy : std::uint8_t { Learned, AlwaysShare, NeverShare, Random };

inline constexpr std::array<Strategy, 4> kAllStrategies{Strategy::Learned, Strategy::AlwaysShare,
                                                        Strategy::NeverShare, Strategy::Random};

/// CLI names: learned, always, never, random.
std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);

/// What a fixed strategy needs to know about the deciding house.
struct SubState {
    bool pending_request = false;
    Kwh grantable = 0.0;               // only meaningful with a pending request
    Kwh balance_after_battery = 0.0;   // negative for a residual deficit
};

/// Always Share asks neighbours for every deficit and grants whenever it can;
/// Never Share buys every deficit from the grid and denies every request;
/// Random draws uniformly from the legal set.
Action baseline_action(Strategy kind, const SubState& sub, ActionSet legal, drl::Rng& rng);

}  // namespace zec
