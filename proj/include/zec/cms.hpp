#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "zec/domain.hpp"

namespace zec::cms {

inline constexpr int kProtocolVersion = 1;

class CmsError : public std::runtime_error {
public:
    enum class Code { DuplicateJoin, UnknownAgent, SlotRegression, ConflictingReport, NoData, BadRequest, Transport };

    CmsError(Code code, const std::string& message);

    [[nodiscard]] Code code() const { return code_; }

private:
    Code code_;
};

std::string_view to_string(CmsError::Code code);
CmsError::Code parse_error_code(std::string_view name);

struct StatusReport {
    std::string agent_id;
    std::int64_t slot = 0;
    Kwh consumed = 0.0;
    Kwh generated = 0.0;

    friend bool operator==(const StatusReport&, const StatusReport&) = default;
};

struct MembershipToken {
    std::string agent_id;
    std::uint64_t sequence = 0;  // registration order
};

/// Operations agents use to cooperate: membership, status collection and the
/// shared reward. Implemented in-process and over HTTP.
class CommunityService {
public:
    virtual ~CommunityService() = default;

    virtual MembershipToken join(const std::string& agent_id) = 0;
    virtual void leave(const std::string& agent_id) = 0;
    [[nodiscard]] virtual std::vector<std::string> list() = 0;

    /// Stores a report. Re-posting an identical report is a no-op; a report
    /// for an earlier slot than the agent's last is rejected.
    virtual void post_status(const StatusReport& report) = 0;

    /// Σ (generated - consumed) over the agents that reported `slot`.
    [[nodiscard]] virtual Kwh community_status(std::int64_t slot) = 0;

    /// The shared reward, -(Σ consumed - generated), identical for every agent.
    [[nodiscard]] virtual double global_reward(std::int64_t slot) = 0;

    /// Sum of the slot rewards over [first, last].
    [[nodiscard]] virtual double episode_reward(std::int64_t first_slot, std::int64_t last_slot) = 0;
};

/// Thread-safe in-memory service. Every operation holds one lock, so the
/// observable history is a sequential one.
class CommunityMonitor final : public CommunityService {
public:
    using Clock = std::chrono::system_clock;

    MembershipToken join(const std::string& agent_id) override;
    void leave(const std::string& agent_id) override;
    [[nodiscard]] std::vector<std::string> list() override;
    void post_status(const StatusReport& report) override;
    [[nodiscard]] Kwh community_status(std::int64_t slot) override;
    [[nodiscard]] double global_reward(std::int64_t slot) override;
    [[nodiscard]] double episode_reward(std::int64_t first_slot, std::int64_t last_slot) override;

    /// Number of times a status was computed while an active agent had not
    /// reported that slot.
    [[nodiscard]] std::uint64_t missing_report_warnings() const;

    /// Drops stored reports for slots before `slot`.
    void prune_before(std::int64_t slot);

    [[nodiscard]] std::size_t stored_slots() const;

private:
    struct Member {
        std::uint64_t sequence = 0;
        Clock::time_point joined;
    };
    struct Entry {
        Kwh consumed = 0.0;
        Kwh generated = 0.0;
    };

    Kwh status_locked(std::int64_t slot);

    mutable std::mutex mutex_;
    std::map<std::string, Member> members_;
    std::map<std::string, std::int64_t> last_slot_;
    std::map<std::int64_t, std::map<std::string, Entry>> reports_;
    std::uint64_t next_sequence_ = 0;
    std::uint64_t missing_warnings_ = 0;
};

}  // namespace zec::cms
