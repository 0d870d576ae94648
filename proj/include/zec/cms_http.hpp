#pragma once

#include <memory>
#include <string>
#include <thread>

#include "zec/cms.hpp"

namespace httplib {
class Server;
class Client;
}  // namespace httplib

namespace zec::cms {

/// Serves a CommunityMonitor over HTTP with JSON bodies:
///
///   POST   /agents                    {"agent_id": id}            join
///   DELETE /agents/{id}                                           leave
///   GET    /agents                                                list
///   POST   /status                    {"agent_id","slot","consumed","generated"}
///   GET    /community/status?slot=N
///   GET    /community/reward?slot=N   (or ?first=A&last=B for a range)
///
/// Every response carries "protocol_version". Errors come back as
/// {"error": {"code", "message"}} with a 4xx status.
class CmsHttpServer {
public:
    explicit CmsHttpServer(CommunityMonitor& monitor);
    ~CmsHttpServer();

    CmsHttpServer(const CmsHttpServer&) = delete;
    CmsHttpServer& operator=(const CmsHttpServer&) = delete;

    /// Binds to `port` (0 picks a free one) and serves on a background
    /// thread. Returns the bound port.
    int start(const std::string& host = "127.0.0.1", int port = 0);
    /// Serves on the calling thread until stop() is called.
    bool listen(const std::string& host, int port);
    void stop();

private:
    CommunityMonitor& monitor_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
};

/// CommunityService backed by a remote CmsHttpServer.
class RemoteCommunityService final : public CommunityService {
public:
    RemoteCommunityService(const std::string& host, int port);
    ~RemoteCommunityService() override;

    MembershipToken join(const std::string& agent_id) override;
    void leave(const std::string& agent_id) override;
    [[nodiscard]] std::vector<std::string> list() override;
    void post_status(const StatusReport& report) override;
    [[nodiscard]] Kwh community_status(std::int64_t slot) override;
    [[nodiscard]] double global_reward(std::int64_t slot) override;
    [[nodiscard]] double episode_reward(std::int64_t first_slot, std::int64_t last_slot) override;

private:
    std::unique_ptr<httplib::Client> client_;
};

}  // namespace zec::cms
