#include "zec/drl.hpp"

#include <cmath>
#include <limits>

namespace zec::drl {

namespace {

void check_state(const StateParts& s)
{
    if (s.slot_of_day < 0 || s.slot_of_day >= kSlotsPerDay) {
        throw InvalidInput("slot of day out of range: " + std::to_string(s.slot_of_day));
    }
    if (s.day_of_week < 0 || s.day_of_week >= kDaysPerWeek) {
        throw InvalidInput("day of week out of range: " + std::to_string(s.day_of_week));
    }
    const auto level = static_cast<int>(s.level);
    if (level < 0 || level >= kEnergyLevelCount) throw InvalidInput("energy level out of range");
}

double uniform01(Rng& rng)
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

Action uniform_choice(ActionSet legal, Rng& rng)
{
    std::uniform_int_distribution<int> pick(0, legal.size() - 1);
    return legal.at(pick(rng));
}

double td_target(const nn::QNetwork& net, const Transition& t, double discount, nn::Workspace& ws)
{
    if (t.terminal || discount == 0.0) return t.reward;
    return t.reward + discount * best_action(net, t.next_state, t.next_legal, ws).second;
}

}  // namespace

ActiveBits encode_active(const StateParts& state, Action action)
{
    check_state(state);
    ActiveBits bits;
    bits.index[0] = kTimeOffset + state.slot_of_day;
    bits.index[1] = kDayOffset + state.day_of_week;
    bits.index[2] = kLevelOffset + static_cast<int>(state.level);
    bits.count = 3;
    if (action != Action::DenyRequest) bits.index[bits.count++] = kActionOffset + static_cast<int>(action);
    return bits;
}

EncodedInput encode(const StateParts& state, Action action)
{
    EncodedInput input{};
    const auto bits = encode_active(state, action);
    for (int idx : bits.span()) input[static_cast<std::size_t>(idx)] = 1.0;
    return input;
}

EncodedInput encode(int slot_of_day, int day_of_week, EnergyLevel level, Action action)
{
    return encode(StateParts{slot_of_day, day_of_week, level}, action);
}

std::vector<int> network_sizes(const LearningParams& params)
{
    std::vector<int> sizes{kInputSize};
    sizes.insert(sizes.end(), params.hidden_layers.begin(), params.hidden_layers.end());
    sizes.push_back(1);
    return sizes;
}

double q_value(const nn::QNetwork& net, const EncodedInput& input)
{
    return net.forward(input);
}

double q_value(const nn::QNetwork& net, const StateParts& state, Action action, nn::Workspace& ws)
{
    const auto bits = encode_active(state, action);
    return net.forward_sparse(bits.span(), ws);
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : records_(capacity)
{
    if (capacity == 0) throw InvalidInput("replay capacity must be positive");
}

void ReplayBuffer::push(const Transition& t)
{
    if (!t.terminal && t.next_legal.empty()) {
        throw InvalidInput("non-terminal transition needs a non-empty next legal set");
    }
    records_[head_] = t;
    head_ = (head_ + 1) % records_.size();
    if (size_ < records_.size()) ++size_;
}

const Transition& ReplayBuffer::at(std::size_t i) const
{
    if (i >= size_) throw std::out_of_range("replay index out of range");
    const std::size_t oldest = (head_ + records_.size() - size_) % records_.size();
    return records_[(oldest + i) % records_.size()];
}

const Transition& ReplayBuffer::latest() const
{
    if (size_ == 0) throw std::out_of_range("replay buffer is empty");
    return at(size_ - 1);
}

std::vector<std::size_t> ReplayBuffer::sample_combined(int batch_size, Rng& rng) const
{
    if (size_ == 0) throw InvalidInput("cannot sample an empty replay buffer");
    if (batch_size < 1) throw InvalidInput("batch size must be positive");
    const std::size_t older = size_ - 1;
    const std::size_t draws = std::min(static_cast<std::size_t>(batch_size - 1), older);
    std::vector<std::size_t> batch;
    batch.reserve(draws + 1);
    if (draws > 0) {
        std::uniform_int_distribution<std::size_t> pick(0, older - 1);
        for (std::size_t i = 0; i < draws; ++i) batch.push_back(pick(rng));
    }
    batch.push_back(size_ - 1);
    return batch;
}

EpsilonSchedule::EpsilonSchedule(int total_episodes, double initial, double decay)
    : total_(total_episodes), interval_(std::max(1, total_episodes / 10)), initial_(initial), decay_(decay)
{
    if (total_episodes < 1) throw InvalidInput("schedule needs at least one episode");
    if (!(initial >= 0.0 && initial <= 1.0)) throw InvalidInput("initial epsilon must be in [0, 1]");
    if (!(decay > 0.0 && decay <= 1.0)) throw InvalidInput("epsilon decay must be in (0, 1]");
}

double EpsilonSchedule::operator()(int episode) const
{
    if (episode < 0) throw InvalidInput("episode index must be non-negative");
    if (episode >= total_) return exploitation();
    return initial_ * std::pow(decay_, episode / interval_);
}

std::pair<Action, double> best_action(const nn::QNetwork& net, const StateParts& state, ActionSet legal,
                                      nn::Workspace& ws)
{
    if (legal.empty()) throw InvalidInput("no legal actions");
    Action best = Action::StoreExcess;
    double best_q = -std::numeric_limits<double>::infinity();
    bool first = true;
    for (Action a : kAllActions) {
        if (!legal.contains(a)) continue;
        const double q = q_value(net, state, a, ws);
        if (first || q > best_q) {
            best = a;
            best_q = q;
            first = false;
        }
    }
    return {best, best_q};
}

Action select_action(const nn::QNetwork& net, const StateParts& state, ActionSet legal, double epsilon,
                     Rng& rng, nn::Workspace& ws)
{
    if (legal.empty()) throw InvalidInput("no legal actions");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InvalidInput("epsilon must be in [0, 1]");
    if (legal.size() == 1) return legal.at(0);
    const double chance = uniform01(rng);
    if (epsilon > 0.0 && chance <= epsilon) return uniform_choice(legal, rng);
    return best_action(net, state, legal, ws).first;
}

Action select_action(const nn::QNetwork& net, const StateParts& state, ActionSet legal, double epsilon,
                     Rng& rng)
{
    auto ws = net.make_workspace();
    return select_action(net, state, legal, epsilon, rng, ws);
}

double batch_loss(const nn::QNetwork& net, const ReplayBuffer& buffer, std::span<const std::size_t> batch,
                  double discount)
{
    auto ws = net.make_workspace();
    double sum = 0.0;
    for (std::size_t idx : batch) {
        const Transition& t = buffer.at(idx);
        const double y = td_target(net, t, discount, ws);
        const double err = q_value(net, t.state, t.action, ws) - y;
        sum += err * err;
    }
    return sum / static_cast<double>(batch.size());
}

TrainResult train_step(nn::QNetwork& net, const ReplayBuffer& buffer, int batch_size, double learning_rate,
                       double discount, Rng& rng, TrainScratch& scratch)
{
    scratch.batch = buffer.sample_combined(batch_size, rng);
    const auto& batch = scratch.batch;
    const auto n = static_cast<double>(batch.size());

    scratch.targets.resize(batch.size());
    for (std::size_t b = 0; b < batch.size(); ++b) {
        scratch.targets[b] = td_target(net, buffer.at(batch[b]), discount, scratch.ws);
    }

    scratch.grads.zero();
    double loss = 0.0;
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const Transition& t = buffer.at(batch[b]);
        const auto bits = encode_active(t.state, t.action);
        const double q = net.forward_sparse(bits.span(), scratch.ws);
        const double err = q - scratch.targets[b];
        loss += err * err;
        // d/dq of mean((q - y)^2)
        net.backward_sparse(bits.span(), 2.0 * err / n, scratch.ws, scratch.grads);
    }
    net.apply(scratch.grads, learning_rate);
    return {loss / n, static_cast<int>(batch.size())};
}

TrainResult train_step(nn::QNetwork& net, const ReplayBuffer& buffer, int batch_size, double learning_rate,
                       double discount, Rng& rng)
{
    TrainScratch scratch(net);
    return train_step(net, buffer, batch_size, learning_rate, discount, rng, scratch);
}

}  // namespace zec::drl
