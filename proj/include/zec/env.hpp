#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "zec/data.hpp"
#include "zec/domain.hpp"

namespace zec {

/// An agent chose an action that is not legal in its current sub-state.
class ProtocolViolation : public std::runtime_error {
public:
    ProtocolViolation(std::string agent_id, Action action, ActionSet legal);

    [[nodiscard]] const std::string& agent_id() const { return agent_id_; }
    [[nodiscard]] Action action() const { return action_; }

private:
    std::string agent_id_;
    Action action_;
};

/// One house's settled half-hour.
///
/// Conservation, per house and slot:
///   generated + drawn_from_grid + received_from_neighbours + max(-battery_delta, 0)
///     = consumed + sent_to_neighbours + max(battery_delta, 0) + wasted
struct StepOutcome {
    std::string agent_id;
    int slot = 0;
    Kwh consumed = 0.0;
    Kwh generated = 0.0;
    Kwh battery_delta = 0.0;
    Kwh received_from_neighbours = 0.0;
    Kwh sent_to_neighbours = 0.0;
    Kwh drawn_from_grid = 0.0;
    Kwh wasted = 0.0;
    Kwh soc_after = 0.0;

    /// Renewable energy this house delivered to loads in the slot, directly or
    /// out of storage: generated - wasted - battery_delta. Energy parked in the
    /// battery counts when it is used, curtailed energy never does.
    [[nodiscard]] Kwh renewable_supply() const { return generated - wasted - battery_delta; }

    /// Left side minus right side of the conservation identity.
    [[nodiscard]] Kwh conservation_residual() const;
};

struct EnergyRequest {
    std::string requester_id;
    std::size_t requester = 0;
    Kwh amount = 0.0;
    Kwh remaining = 0.0;
};

/// A house's position after netting its own load, generation and battery,
/// before any sharing.
struct LocalPosition {
    Kwh consumption = 0.0;
    Kwh generation = 0.0;
    Kwh discharged = 0.0;   // battery energy used for the house's own load
    Kwh deficit = 0.0;      // load left uncovered after the battery
    Kwh surplus = 0.0;      // generation left after the load
    Kwh soc = 0.0;          // battery charge after own discharge

    [[nodiscard]] Kwh balance_after_battery() const { return surplus - deficit; }
};

/// Legal choices for a house. A pending request restricts the choice to
/// grant/deny (grant only with something to give); otherwise a deficit may
/// be sent to the neighbours or the grid and a balanced or surplus house can
/// only store.
ActionSet legal_actions(Kwh net_balance_after_battery, const std::optional<EnergyRequest>& pending,
                        Kwh grantable_surplus = 0.0);

/// Σ (renewable supply - consumed) over houses. Transfers cancel, grid draws
/// are not generation.
Kwh community_net_balance(std::span<const StepOutcome> outcomes);

/// Called during settlement when `request` is offered to `donor`. Must return
/// an action from `legal`.
using GrantResponder =
    std::function<Action(std::size_t donor, const EnergyRequest& request, Kwh grantable, ActionSet legal)>;

struct Percept {
    Kwh consumption = 0.0;
    Kwh generation = 0.0;
};

/// Deterministic half-hour community environment. Owns the per-house
/// consumption and generation series and the battery states.
class Environment {
public:
    explicit Environment(const ScenarioConfig& config);

    [[nodiscard]] const ScenarioConfig& config() const { return config_; }
    [[nodiscard]] std::size_t size() const { return houses_.size(); }
    [[nodiscard]] int horizon() const { return config_.horizon(); }
    [[nodiscard]] const std::string& agent_id(std::size_t index) const { return config_.houses[index].agent_id; }
    [[nodiscard]] std::size_t index_of(const std::string& agent_id) const;

    [[nodiscard]] Percept percept(std::size_t agent, int slot) const;
    [[nodiscard]] Percept percept(const std::string& agent_id, int slot) const;

    [[nodiscard]] const BatteryBank& battery(std::size_t agent) const { return houses_.at(agent).battery; }
    [[nodiscard]] Kwh donor_reserve() const { return config_.donor_reserve; }

    /// Restores the configured initial battery charges.
    void reset();

    /// Phase-one netting for every house at `slot`; does not mutate state.
    [[nodiscard]] std::vector<LocalPosition> local_positions(int slot) const;

    /// Settles one slot. `chosen[i]` is house i's primary action. Requests are
    /// served in configuration order, each offered to donors in configuration
    /// order; partial grants roll over to the next donor and whatever is left
    /// is drawn from the grid. Throws ProtocolViolation on an illegal choice.
    std::vector<StepOutcome> settle_step(std::span<const Action> chosen, int slot,
                                         const GrantResponder& respond);

private:
    struct House {
        std::vector<Kwh> consumption;
        std::vector<Kwh> generation;
        BatteryBank battery;
    };

    void check_slot(int slot) const;

    ScenarioConfig config_;
    std::vector<House> houses_;
};

}  // namespace zec
