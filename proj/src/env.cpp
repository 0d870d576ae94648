#include "zec/env.hpp"

#include <algorithm>
#include <cmath>

namespace zec {

namespace {

// Amounts below this are rounding noise, not energy.
constexpr Kwh kEnergyEpsilon = 1e-12;

std::string violation_message(const std::string& agent_id, Action action, ActionSet legal)
{
    return "agent " + agent_id + " chose " + std::string(to_string(action)) + ", legal set is " +
           to_string(legal);
}

}  // namespace

ProtocolViolation::ProtocolViolation(std::string agent_id, Action action, ActionSet legal)
    : std::runtime_error(violation_message(agent_id, action, legal)),
      agent_id_(std::move(agent_id)),
      action_(action)
{
}

Kwh StepOutcome::conservation_residual() const
{
    const Kwh in = generated + drawn_from_grid + received_from_neighbours + std::max(-battery_delta, 0.0);
    const Kwh out = consumed + sent_to_neighbours + std::max(battery_delta, 0.0) + wasted;
    return in - out;
}

ActionSet legal_actions(Kwh net_balance_after_battery, const std::optional<EnergyRequest>& pending,
                        Kwh grantable_surplus)
{
    require_finite(net_balance_after_battery, "net balance");
    if (pending) {
        ActionSet set{Action::DenyRequest};
        if (grantable_surplus > kEnergyEpsilon) set.insert(Action::GrantRequest);
        return set;
    }
    if (net_balance_after_battery < -kEnergyEpsilon) {
        return {Action::RequestNeighbour, Action::RequestGrid};
    }
    return {Action::StoreExcess};
}

Kwh community_net_balance(std::span<const StepOutcome> outcomes)
{
    if (outcomes.empty()) throw InvalidInput("community_net_balance needs at least one outcome");
    Kwh total = 0.0;
    for (const auto& o : outcomes) total += o.renewable_supply() - o.consumed;
    return total;
}

Environment::Environment(const ScenarioConfig& config) : config_(config)
{
    config_.validate();
    const auto exposure = data::resolve_exposure(config_);
    const auto horizon = static_cast<std::size_t>(config_.horizon());
    houses_.reserve(config_.houses.size());
    for (const auto& hc : config_.houses) {
        House h;
        h.consumption = data::resolve_consumption(hc.consumption, config_.days).readings;
        h.generation.resize(horizon);
        for (std::size_t s = 0; s < horizon; ++s) {
            h.generation[s] = data::generation_for(hc.solar_cells, exposure.readings[s], config_.yield_factor);
        }
        h.battery = hc.make_battery();
        houses_.push_back(std::move(h));
    }
}

std::size_t Environment::index_of(const std::string& agent_id) const
{
    for (std::size_t i = 0; i < config_.houses.size(); ++i) {
        if (config_.houses[i].agent_id == agent_id) return i;
    }
    throw InvalidInput("unknown agent: " + agent_id);
}

void Environment::check_slot(int slot) const
{
    if (slot < 0 || slot >= horizon()) {
        throw InvalidInput("slot " + std::to_string(slot) + " outside horizon of " +
                           std::to_string(horizon()));
    }
}

Percept Environment::percept(std::size_t agent, int slot) const
{
    if (agent >= houses_.size()) throw InvalidInput("unknown agent index " + std::to_string(agent));
    check_slot(slot);
    const auto s = static_cast<std::size_t>(slot);
    return {houses_[agent].consumption[s], houses_[agent].generation[s]};
}

Percept Environment::percept(const std::string& agent_id, int slot) const
{
    return percept(index_of(agent_id), slot);
}

void Environment::reset()
{
    for (std::size_t i = 0; i < houses_.size(); ++i) {
        houses_[i].battery.set_soc(config_.houses[i].initial_charge);
    }
}

std::vector<LocalPosition> Environment::local_positions(int slot) const
{
    check_slot(slot);
    const auto s = static_cast<std::size_t>(slot);
    std::vector<LocalPosition> out(houses_.size());
    for (std::size_t i = 0; i < houses_.size(); ++i) {
        const House& h = houses_[i];
        LocalPosition& p = out[i];
        p.consumption = h.consumption[s];
        p.generation = h.generation[s];
        p.soc = h.battery.soc();
        const Kwh net = p.generation - p.consumption;
        if (net >= 0.0) {
            p.surplus = net;
        } else {
            p.discharged = std::min(-net, p.soc);
            p.soc -= p.discharged;
            p.deficit = -net - p.discharged;
            if (p.deficit <= kEnergyEpsilon) p.deficit = 0.0;
        }
    }
    return out;
}

std::vector<StepOutcome> Environment::settle_step(std::span<const Action> chosen, int slot,
                                                  const GrantResponder& respond)
{
    if (chosen.size() != houses_.size()) {
        throw InvalidInput("settle_step needs one action per house");
    }
    auto pos = local_positions(slot);
    const std::size_t n = houses_.size();

    for (std::size_t i = 0; i < n; ++i) {
        const ActionSet legal = legal_actions(pos[i].balance_after_battery(), std::nullopt);
        if (!legal.contains(chosen[i])) throw ProtocolViolation(agent_id(i), chosen[i], legal);
    }

    std::vector<StepOutcome> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].agent_id = agent_id(i);
        out[i].slot = slot;
        out[i].consumed = pos[i].consumption;
        out[i].generated = pos[i].generation;
    }

    // Sharing. Donors give uncommitted surplus first, then battery charge
    // above the reserve.
    const double keep = 1.0 - config_.transfer_loss;
    auto grantable = [&](std::size_t j) {
        return pos[j].surplus + std::max(0.0, pos[j].soc - config_.donor_reserve);
    };
    for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i] != Action::RequestNeighbour) continue;
        EnergyRequest req{agent_id(i), i, pos[i].deficit, pos[i].deficit};
        for (std::size_t j = 0; j < n && req.remaining > kEnergyEpsilon; ++j) {
            if (j == i) continue;
            const Kwh available = grantable(j);
            if (available <= kEnergyEpsilon) continue;
            const ActionSet legal = legal_actions(pos[j].balance_after_battery(), req, available);
            const Action answer = respond(j, req, available, legal);
            if (!legal.contains(answer)) throw ProtocolViolation(agent_id(j), answer, legal);
            if (answer != Action::GrantRequest) continue;

            const Kwh sent = std::min(req.remaining / keep, available);
            const Kwh from_surplus = std::min(sent, pos[j].surplus);
            pos[j].surplus -= from_surplus;
            pos[j].soc -= sent - from_surplus;
            if (pos[j].soc < 0.0) pos[j].soc = 0.0;
            const Kwh delivered = sent * keep;
            out[j].sent_to_neighbours += sent;
            out[i].received_from_neighbours += delivered;
            req.remaining = std::max(0.0, req.remaining - delivered);
        }
        pos[i].deficit = req.remaining <= kEnergyEpsilon ? 0.0 : req.remaining;
    }

    // Grid fallback for residual deficits, then storage of leftover surplus.
    for (std::size_t i = 0; i < n; ++i) {
        House& h = houses_[i];
        StepOutcome& o = out[i];
        o.drawn_from_grid = pos[i].deficit;
        const Kwh soc_before = h.battery.soc();
        h.battery.set_soc(std::clamp(pos[i].soc, 0.0, h.battery.capacity()));
        const Kwh stored = h.battery.charge(pos[i].surplus);
        o.wasted = pos[i].surplus - stored;
        o.soc_after = h.battery.soc();
        o.battery_delta = o.soc_after - soc_before;
    }
    return out;
}

}  // namespace zec
