#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "zec/domain.hpp"
#include "zec/nn.hpp"

namespace zec::drl {

using Rng = std::mt19937_64;

// Input layout: time-of-day one-hot [0, 48), day-of-week one-hot [48, 55),
// own net-balance level one-hot [55, 59), action one-hot [59, 63) over
// StoreExcess, RequestNeighbour, RequestGrid, GrantRequest. DenyRequest
// leaves the action block empty.
inline constexpr int kTimeOffset = 0;
inline constexpr int kDayOffset = kTimeOffset + kSlotsPerDay;
inline constexpr int kLevelOffset = kDayOffset + kDaysPerWeek;
inline constexpr int kActionOffset = kLevelOffset + kEnergyLevelCount;
inline constexpr int kInputSize = kActionOffset + 4;
static_assert(kInputSize == 63);

/// What an agent sees at a decision point.
struct StateParts {
    int slot_of_day = 0;  // 0..47
    int day_of_week = 0;  // 0..6
    EnergyLevel level = EnergyLevel::None;

    friend bool operator==(const StateParts&, const StateParts&) = default;
};

using EncodedInput = std::array<double, kInputSize>;

/// Indices of the set bits of an encoding: three or four entries.
struct ActiveBits {
    std::array<int, 4> index{};
    int count = 0;

    [[nodiscard]] std::span<const int> span() const { return {index.data(), static_cast<std::size_t>(count)}; }
};

ActiveBits encode_active(const StateParts& state, Action action);
EncodedInput encode(const StateParts& state, Action action);
EncodedInput encode(int slot_of_day, int day_of_week, EnergyLevel level, Action action);

/// Network layer sizes {63, hidden..., 1}.
std::vector<int> network_sizes(const LearningParams& params);

double q_value(const nn::QNetwork& net, const EncodedInput& input);
double q_value(const nn::QNetwork& net, const StateParts& state, Action action, nn::Workspace& ws);

struct Transition {
    StateParts state;
    Action action = Action::StoreExcess;
    double reward = 0.0;
    StateParts next_state;
    ActionSet next_legal;
    bool terminal = false;
};

/// Bounded FIFO of transitions; the oldest record is evicted first.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(const Transition& t);
    [[nodiscard]] std::size_t size() const { return size_; }
    [[nodiscard]] std::size_t capacity() const { return records_.size(); }
    [[nodiscard]] bool empty() const { return size_ == 0; }
    /// i-th record counting from the oldest.
    [[nodiscard]] const Transition& at(std::size_t i) const;
    [[nodiscard]] const Transition& latest() const;

    /// Combined experience replay: min(batch - 1, size - 1) records drawn
    /// uniformly with replacement from everything but the latest record,
    /// followed by the latest record itself. Returns logical indices.
    [[nodiscard]] std::vector<std::size_t> sample_combined(int batch_size, Rng& rng) const;

private:
    std::vector<Transition> records_;
    std::size_t head_ = 0;  // next write position
    std::size_t size_ = 0;
};

/// ε starts at 1 and is multiplied by 0.8 after every tenth of the training
/// episodes: ε(e) = 0.8^floor(e / interval). Past the last training episode
/// the schedule is in exploitation mode and returns 0.
class EpsilonSchedule {
public:
    explicit EpsilonSchedule(int total_episodes, double initial = 1.0, double decay = 0.8);

    [[nodiscard]] double operator()(int episode) const;
    [[nodiscard]] int decay_interval() const { return interval_; }
    [[nodiscard]] int total_episodes() const { return total_; }
    [[nodiscard]] static double exploitation() { return 0.0; }

private:
    int total_;
    int interval_;
    double initial_;
    double decay_;
};

/// ε-greedy over `legal`: a uniform legal action when a uniform draw is at
/// most ε, otherwise the legal action with the largest Q-value, ties going to
/// the earlier action in enumeration order.
Action select_action(const nn::QNetwork& net, const StateParts& state, ActionSet legal, double epsilon,
                     Rng& rng, nn::Workspace& ws);
Action select_action(const nn::QNetwork& net, const StateParts& state, ActionSet legal, double epsilon,
                     Rng& rng);

/// Greedy action and its Q-value.
std::pair<Action, double> best_action(const nn::QNetwork& net, const StateParts& state, ActionSet legal,
                                      nn::Workspace& ws);

/// Reusable buffers for train_step.
struct TrainScratch {
    nn::Workspace ws;
    nn::Gradients grads;
    std::vector<double> targets;
    std::vector<std::size_t> batch;

    explicit TrainScratch(const nn::QNetwork& net) : ws(net.make_workspace()), grads(net.make_gradients()) {}
};

struct TrainResult {
    double loss = 0.0;  // mean squared TD error before the update
    int batch = 0;
};

/// One SGD step on the mean squared TD error over a combined-replay batch.
/// Targets use the network as it is before the update:
///   y = r                                   for terminal transitions
///   y = r + γ max_{a' legal} Q(s', a')      otherwise
TrainResult train_step(nn::QNetwork& net, const ReplayBuffer& buffer, int batch_size, double learning_rate,
                       double discount, Rng& rng, TrainScratch& scratch);
TrainResult train_step(nn::QNetwork& net, const ReplayBuffer& buffer, int batch_size, double learning_rate,
                       double discount, Rng& rng);

/// Mean squared TD error of `net` on the given transitions, targets from `net`.
double batch_loss(const nn::QNetwork& net, const ReplayBuffer& buffer, std::span<const std::size_t> batch,
                  double discount);

}  // namespace zec::drl
