#include "zec/cms.hpp"

#include <array>
#include <utility>

namespace zec::cms {

namespace {

constexpr std::array<std::pair<CmsError::Code, std::string_view>, 7> kCodeNames{{
    {CmsError::Code::DuplicateJoin, "duplicate_join"},
    {CmsError::Code::UnknownAgent, "unknown_agent"},
    {CmsError::Code::SlotRegression, "slot_regression"},
    {CmsError::Code::ConflictingReport, "conflicting_report"},
    {CmsError::Code::NoData, "no_data"},
    {CmsError::Code::BadRequest, "bad_request"},
    {CmsError::Code::Transport, "transport"},
}};

}  // namespace

CmsError::CmsError(Code code, const std::string& message) : std::runtime_error(message), code_(code) {}

std::string_view to_string(CmsError::Code code)
{
    for (const auto& [c, name] : kCodeNames) {
        if (c == code) return name;
    }
    return "unknown";
}

CmsError::Code parse_error_code(std::string_view name)
{
    for (const auto& [c, n] : kCodeNames) {
        if (n == name) return c;
    }
    return CmsError::Code::Transport;
}

MembershipToken CommunityMonitor::join(const std::string& agent_id)
{
    if (agent_id.empty()) throw CmsError(CmsError::Code::BadRequest, "agent id is empty");
    std::lock_guard lock(mutex_);
    if (members_.contains(agent_id)) {
        throw CmsError(CmsError::Code::DuplicateJoin, "agent already joined: " + agent_id);
    }
    const auto seq = next_sequence_++;
    members_.emplace(agent_id, Member{seq, Clock::now()});
    return {agent_id, seq};
}

void CommunityMonitor::leave(const std::string& agent_id)
{
    std::lock_guard lock(mutex_);
    if (members_.erase(agent_id) == 0) {
        throw CmsError(CmsError::Code::UnknownAgent, "agent is not a member: " + agent_id);
    }
}

std::vector<std::string> CommunityMonitor::list()
{
    std::lock_guard lock(mutex_);
    std::vector<std::string> ids;
    ids.reserve(members_.size());
    for (const auto& [id, m] : members_) ids.push_back(id);
    return ids;
}

void CommunityMonitor::post_status(const StatusReport& report)
{
    require_finite(report.consumed, "consumed");
    require_finite(report.generated, "generated");
    if (report.consumed < 0.0 || report.generated < 0.0) {
        throw CmsError(CmsError::Code::BadRequest, "reported energies must be non-negative");
    }
    std::lock_guard lock(mutex_);
    if (!members_.contains(report.agent_id)) {
        throw CmsError(CmsError::Code::UnknownAgent, "agent is not a member: " + report.agent_id);
    }
    if (auto it = last_slot_.find(report.agent_id); it != last_slot_.end() && report.slot < it->second) {
        throw CmsError(CmsError::Code::SlotRegression,
                       "slot " + std::to_string(report.slot) + " precedes last reported slot " +
                           std::to_string(it->second) + " for " + report.agent_id);
    }
    auto& slot_reports = reports_[report.slot];
    if (auto it = slot_reports.find(report.agent_id); it != slot_reports.end()) {
        if (it->second.consumed == report.consumed && it->second.generated == report.generated) return;
        throw CmsError(CmsError::Code::ConflictingReport,
                       "a different report for slot " + std::to_string(report.slot) + " already exists for " +
                           report.agent_id);
    }
    slot_reports.emplace(report.agent_id, Entry{report.consumed, report.generated});
    last_slot_[report.agent_id] = report.slot;
}

Kwh CommunityMonitor::status_locked(std::int64_t slot)
{
    const auto it = reports_.find(slot);
    if (it == reports_.end() || it->second.empty()) {
        throw CmsError(CmsError::Code::NoData, "no reports for slot " + std::to_string(slot));
    }
    for (const auto& [id, m] : members_) {
        if (!it->second.contains(id)) {
            ++missing_warnings_;
            break;
        }
    }
    Kwh total = 0.0;
    for (const auto& [id, e] : it->second) total += e.generated - e.consumed;
    return total;
}

Kwh CommunityMonitor::community_status(std::int64_t slot)
{
    std::lock_guard lock(mutex_);
    return status_locked(slot);
}

double CommunityMonitor::global_reward(std::int64_t slot)
{
    // reward = -(Σ consumed - generated), the same number as the status.
    std::lock_guard lock(mutex_);
    return status_locked(slot);
}

double CommunityMonitor::episode_reward(std::int64_t first_slot, std::int64_t last_slot)
{
    if (last_slot < first_slot) throw CmsError(CmsError::Code::BadRequest, "empty slot range");
    std::lock_guard lock(mutex_);
    double total = 0.0;
    for (auto s = first_slot; s <= last_slot; ++s) total += status_locked(s);
    return total;
}

std::uint64_t CommunityMonitor::missing_report_warnings() const
{
    std::lock_guard lock(mutex_);
    return missing_warnings_;
}

void CommunityMonitor::prune_before(std::int64_t slot)
{
    std::lock_guard lock(mutex_);
    reports_.erase(reports_.begin(), reports_.lower_bound(slot));
}

std::size_t CommunityMonitor::stored_slots() const
{
    std::lock_guard lock(mutex_);
    return reports_.size();
}

}  // namespace zec::cms
