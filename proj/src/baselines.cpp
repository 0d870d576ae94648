#include "zec/baselines.hpp"

namespace zec {

std::string_view to_string(Strategy s)
{
    switch (s) {
    case Strategy::Learned: return "learned";
    case Strategy::AlwaysShare: return "always";
    case Strategy::NeverShare: return "never";
    case Strategy::Random: return "random";
    }
    return "?";
}

std::optional<Strategy> parse_strategy(std::string_view name)
{
    for (Strategy s : kAllStrategies) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

Action baseline_action(Strategy kind, const SubState& sub, ActionSet legal, drl::Rng& rng)
{
    if (legal.empty()) throw InvalidInput("no legal actions");
    auto prefer = [&](Action first, Action fallback) {
        if (legal.contains(first)) return first;
        if (legal.contains(fallback)) return fallback;
        return legal.at(0);
    };
    switch (kind) {
    case Strategy::AlwaysShare:
        if (sub.pending_request) return prefer(Action::GrantRequest, Action::DenyRequest);
        return prefer(Action::RequestNeighbour, Action::StoreExcess);
    case Strategy::NeverShare:
        if (sub.pending_request) return prefer(Action::DenyRequest, Action::GrantRequest);
        return prefer(Action::RequestGrid, Action::StoreExcess);
    case Strategy::Random: {
        std::uniform_int_distribution<int> pick(0, legal.size() - 1);
        return legal.at(pick(rng));
    }
    case Strategy::Learned: break;
    }
    throw InvalidInput("baseline_action called with the learned strategy");
}

}  // namespace zec
