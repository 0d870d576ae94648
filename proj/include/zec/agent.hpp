#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "zec/baselines.hpp"
#include "zec/cms.hpp"
#include "zec/drl.hpp"
#include "zec/env.hpp"

namespace zec {

/// A house's view of itself at a decision point.
struct AgentState {
    Kwh consumed = 0.0;
    Kwh generated = 0.0;
    Kwh stored = 0.0;
    std::optional<EnergyRequest> pending_request;
};

/// The community as last reported by the monitoring service.
struct EnvironmentView {
    Kwh community_balance = 0.0;
};

struct DecisionPoint {
    drl::StateParts state;
    ActionSet legal;
    SubState sub;
};

/// One house's DQN learner. Each decision closes the previous one into a
/// transition (its next state is the new decision point), stores it and runs
/// one training step. Rewards are credited to the latest decision.
class DqnAgent {
public:
    DqnAgent(std::string agent_id, const LearningParams& params, drl::Rng& init_rng);

    [[nodiscard]] const std::string& id() const { return id_; }

    Action act(const DecisionPoint& point, double epsilon, drl::Rng& rng);
    void reward(double r);
    /// Marks the open decision terminal and learns from it.
    void end_episode(drl::Rng& rng);

    /// With learning off the agent still acts but stores and trains nothing.
    void set_learning(bool enabled) { learning_ = enabled; }
    [[nodiscard]] bool learning() const { return learning_; }

    [[nodiscard]] const nn::QNetwork& network() const { return net_; }
    [[nodiscard]] nn::QNetwork& network() { return net_; }
    [[nodiscard]] const drl::ReplayBuffer& buffer() const { return buffer_; }
    [[nodiscard]] std::size_t train_steps() const { return train_steps_; }
    [[nodiscard]] double last_loss() const { return last_loss_; }

    AgentState state;
    EnvironmentView view;

private:
    void learn(const drl::Transition& t, drl::Rng& rng);

    std::string id_;
    LearningParams params_;
    nn::QNetwork net_;
    drl::ReplayBuffer buffer_;
    drl::TrainScratch scratch_;
    std::optional<drl::Transition> open_;
    bool learning_ = true;
    std::size_t train_steps_ = 0;
    double last_loss_ = 0.0;
};

/// Chooses actions for every house of a community.
class Policy {
public:
    virtual ~Policy() = default;
    [[nodiscard]] virtual Strategy strategy() const = 0;
    virtual void begin_episode(double /*epsilon*/) {}
    virtual Action decide(std::size_t agent, const DecisionPoint& point, drl::Rng& rng) = 0;
    virtual void reward(std::size_t /*agent*/, double /*r*/) {}
    virtual void end_episode(drl::Rng& /*rng*/) {}
};

class BaselinePolicy final : public Policy {
public:
    explicit BaselinePolicy(Strategy kind);
    [[nodiscard]] Strategy strategy() const override { return kind_; }
    Action decide(std::size_t agent, const DecisionPoint& point, drl::Rng& rng) override;

private:
    Strategy kind_;
};

class LearnedPolicy final : public Policy {
public:
    LearnedPolicy(const ScenarioConfig& config, drl::Rng& init_rng);

    [[nodiscard]] Strategy strategy() const override { return Strategy::Learned; }
    void begin_episode(double epsilon) override { epsilon_ = epsilon; }
    Action decide(std::size_t agent, const DecisionPoint& point, drl::Rng& rng) override;
    void reward(std::size_t agent, double r) override;
    void end_episode(drl::Rng& rng) override;

    void set_learning(bool enabled);
    [[nodiscard]] double epsilon() const { return epsilon_; }
    [[nodiscard]] std::vector<DqnAgent>& agents() { return agents_; }
    [[nodiscard]] const std::vector<DqnAgent>& agents() const { return agents_; }

private:
    std::vector<DqnAgent> agents_;
    double epsilon_ = 1.0;
};

struct AgentEpisodeStats {
    std::string agent_id;
    std::array<int, kActionCount> actions{};
    int decisions = 0;
    Kwh consumed = 0.0;
    Kwh generated = 0.0;
    Kwh grid = 0.0;
    Kwh requested_from_neighbours = 0.0;
    Kwh received_from_neighbours = 0.0;
    Kwh sent_to_neighbours = 0.0;
    Kwh wasted = 0.0;
    Kwh final_battery = 0.0;
};

struct EpisodeReport {
    int episode = 0;
    double epsilon = 0.0;
    int slots = 0;
    Kwh community_status = 0.0;  // Σ of the slot rewards
    std::vector<AgentEpisodeStats> agents;

    friend bool operator==(const EpisodeReport&, const EpisodeReport&) = default;
};

bool operator==(const AgentEpisodeStats& a, const AgentEpisodeStats& b);

/// Receives every settled slot; used for the per-step log.
using StepSink = std::function<void(int episode, std::span<const StepOutcome>)>;

/// Decision-time state for house `agent`: slot, weekday and the level of its
/// balance after its own battery.
drl::StateParts primary_state(int slot, const LocalPosition& position, const Thresholds& thresholds);

/// One half-hour of the agent loop for the whole community: percepts and
/// battery netting, legal actions, ε-greedy (or fixed) choices, settlement
/// with grant/deny decisions, status reports to the CMS and the shared
/// reward back to every agent.
std::vector<StepOutcome> step_slot(Policy& policy, Environment& env, cms::CommunityService& cms, int episode,
                                   int slot, drl::Rng& rng, EpisodeReport* report = nullptr);

/// Resets batteries and runs every slot of the horizon. The CMS slot key is
/// episode x horizon + slot so reports stay monotone across episodes.
EpisodeReport run_episode(Policy& policy, Environment& env, cms::CommunityService& cms, int episode,
                          double epsilon, drl::Rng& rng, const StepSink& sink = {});

/// Same as run_episode but over the first `slots` slots only.
EpisodeReport run_episode_slots(Policy& policy, Environment& env, cms::CommunityService& cms, int episode,
                                double epsilon, int slots, drl::Rng& rng, const StepSink& sink = {});

}  // namespace zec
