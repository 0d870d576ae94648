#include "zec/agent.hpp"

#include <algorithm>

namespace zec {

bool operator==(const AgentEpisodeStats& a, const AgentEpisodeStats& b)
{
    return a.agent_id == b.agent_id && a.actions == b.actions && a.decisions == b.decisions &&
           a.consumed == b.consumed && a.generated == b.generated && a.grid == b.grid &&
           a.requested_from_neighbours == b.requested_from_neighbours &&
           a.received_from_neighbours == b.received_from_neighbours &&
           a.sent_to_neighbours == b.sent_to_neighbours && a.wasted == b.wasted &&
           a.final_battery == b.final_battery;
}

DqnAgent::DqnAgent(std::string agent_id, const LearningParams& params, drl::Rng& init_rng)
    : id_(std::move(agent_id)),
      params_(params),
      net_(nn::QNetwork::glorot(drl::network_sizes(params), init_rng)),
      buffer_(static_cast<std::size_t>(params.replay_capacity)),
      scratch_(net_)
{
}

void DqnAgent::learn(const drl::Transition& t, drl::Rng& rng)
{
    if (!learning_) return;
    buffer_.push(t);
    const auto result = drl::train_step(net_, buffer_, params_.batch_size, params_.learning_rate,
                                        params_.discount, rng, scratch_);
    last_loss_ = result.loss;
    ++train_steps_;
}

Action DqnAgent::act(const DecisionPoint& point, double epsilon, drl::Rng& rng)
{
    if (open_) {
        open_->next_state = point.state;
        open_->next_legal = point.legal;
        open_->terminal = false;
        learn(*open_, rng);
    }
    const Action a = drl::select_action(net_, point.state, point.legal, epsilon, rng, scratch_.ws);
    open_ = drl::Transition{point.state, a, 0.0, point.state, {}, false};
    return a;
}

void DqnAgent::reward(double r)
{
    if (open_) open_->reward += r;
}

void DqnAgent::end_episode(drl::Rng& rng)
{
    if (!open_) return;
    open_->terminal = true;
    open_->next_legal = {};
    learn(*open_, rng);
    open_.reset();
}

BaselinePolicy::BaselinePolicy(Strategy kind) : kind_(kind)
{
    if (kind == Strategy::Learned) throw InvalidInput("the learned strategy is not a baseline");
}

Action BaselinePolicy::decide(std::size_t, const DecisionPoint& point, drl::Rng& rng)
{
    return baseline_action(kind_, point.sub, point.legal, rng);
}

LearnedPolicy::LearnedPolicy(const ScenarioConfig& config, drl::Rng& init_rng)
{
    agents_.reserve(config.houses.size());
    for (const auto& h : config.houses) agents_.emplace_back(h.agent_id, config.learning, init_rng);
}

Action LearnedPolicy::decide(std::size_t agent, const DecisionPoint& point, drl::Rng& rng)
{
    return agents_.at(agent).act(point, epsilon_, rng);
}

void LearnedPolicy::reward(std::size_t agent, double r)
{
    agents_.at(agent).reward(r);
}

void LearnedPolicy::end_episode(drl::Rng& rng)
{
    for (auto& a : agents_) a.end_episode(rng);
}

void LearnedPolicy::set_learning(bool enabled)
{
    for (auto& a : agents_) a.set_learning(enabled);
}

drl::StateParts primary_state(int slot, const LocalPosition& position, const Thresholds& thresholds)
{
    return {slot % kSlotsPerDay, (slot / kSlotsPerDay) % kDaysPerWeek,
            discretize(position.balance_after_battery(), thresholds)};
}

namespace {

void count(EpisodeReport* report, std::size_t agent, Action a)
{
    if (!report) return;
    auto& s = report->agents[agent];
    ++s.actions[static_cast<std::size_t>(a)];
    ++s.decisions;
}

}  // namespace

std::vector<StepOutcome> step_slot(Policy& policy, Environment& env, cms::CommunityService& cms, int episode,
                                   int slot, drl::Rng& rng, EpisodeReport* report)
{
    const auto positions = env.local_positions(slot);
    const auto& thresholds = env.config().thresholds;
    const std::size_t n = env.size();

    std::vector<Action> chosen(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = positions[i];
        DecisionPoint point{primary_state(slot, p, thresholds),
                            legal_actions(p.balance_after_battery(), std::nullopt),
                            SubState{false, 0.0, p.balance_after_battery()}};
        if (auto* learned = dynamic_cast<LearnedPolicy*>(&policy)) {
            auto& st = learned->agents()[i].state;
            st.consumed = p.consumption;
            st.generated = p.generation;
            st.stored = env.battery(i).soc();
            st.pending_request.reset();
        }
        chosen[i] = policy.decide(i, point, rng);
        count(report, i, chosen[i]);
        if (report && chosen[i] == Action::RequestNeighbour) {
            report->agents[i].requested_from_neighbours += p.deficit;
        }
    }

    const GrantResponder respond = [&](std::size_t donor, const EnergyRequest& req, Kwh grantable,
                                       ActionSet legal) {
        const auto& p = positions[donor];
        drl::StateParts state{slot % kSlotsPerDay, (slot / kSlotsPerDay) % kDaysPerWeek,
                              discretize(grantable, thresholds)};
        DecisionPoint point{state, legal, SubState{true, grantable, p.balance_after_battery()}};
        if (auto* learned = dynamic_cast<LearnedPolicy*>(&policy)) {
            learned->agents()[donor].state.pending_request = req;
        }
        const Action a = policy.decide(donor, point, rng);
        count(report, donor, a);
        return a;
    };

    auto outcomes = env.settle_step(chosen, slot, respond);

    const std::int64_t key = static_cast<std::int64_t>(episode) * env.horizon() + slot;
    for (const auto& o : outcomes) {
        cms.post_status({o.agent_id, key, o.consumed, std::max(0.0, o.renewable_supply())});
    }
    const double r = cms.global_reward(key);
    for (std::size_t i = 0; i < n; ++i) {
        policy.reward(i, r);
        if (auto* learned = dynamic_cast<LearnedPolicy*>(&policy)) {
            learned->agents()[i].view.community_balance = r;
        }
    }

    if (report) {
        report->community_status += r;
        ++report->slots;
        for (std::size_t i = 0; i < n; ++i) {
            auto& s = report->agents[i];
            const auto& o = outcomes[i];
            s.consumed += o.consumed;
            s.generated += o.generated;
            s.grid += o.drawn_from_grid;
            s.received_from_neighbours += o.received_from_neighbours;
            s.sent_to_neighbours += o.sent_to_neighbours;
            s.wasted += o.wasted;
            s.final_battery = o.soc_after;
        }
    }
    return outcomes;
}

EpisodeReport run_episode_slots(Policy& policy, Environment& env, cms::CommunityService& cms, int episode,
                                double epsilon, int slots, drl::Rng& rng, const StepSink& sink)
{
    env.reset();
    EpisodeReport report;
    report.episode = episode;
    report.epsilon = policy.strategy() == Strategy::Learned ? epsilon : 0.0;
    report.agents.resize(env.size());
    for (std::size_t i = 0; i < env.size(); ++i) {
        report.agents[i].agent_id = env.agent_id(i);
        report.agents[i].final_battery = env.battery(i).soc();
    }
    if (slots <= 0) return report;

    policy.begin_episode(epsilon);
    const int last = std::min(slots, env.horizon());
    for (int slot = 0; slot < last; ++slot) {
        auto outcomes = step_slot(policy, env, cms, episode, slot, rng, &report);
        if (sink) sink(episode, outcomes);
    }
    policy.end_episode(rng);
    return report;
}

EpisodeReport run_episode(Policy& policy, Environment& env, cms::CommunityService& cms, int episode,
                          double epsilon, drl::Rng& rng, const StepSink& sink)
{
    return run_episode_slots(policy, env, cms, episode, epsilon, env.horizon(), rng, sink);
}

}  // namespace zec
