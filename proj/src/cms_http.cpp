#include "zec/cms_http.hpp"

#include <charconv>

#include <httplib.h>
#include <json.hpp>

namespace zec::cms {

using nlohmann::json;

namespace {

int http_status(CmsError::Code code)
{
    switch (code) {
    case CmsError::Code::DuplicateJoin:
    case CmsError::Code::SlotRegression:
    case CmsError::Code::ConflictingReport: return 409;
    case CmsError::Code::UnknownAgent:
    case CmsError::Code::NoData: return 404;
    case CmsError::Code::BadRequest:
    case CmsError::Code::Transport: return 400;
    }
    return 500;
}

void reply(httplib::Response& res, int status, json body)
{
    body["protocol_version"] = kProtocolVersion;
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, CmsError::Code code, const std::string& message)
{
    reply(res, http_status(code), json{{"error", {{"code", to_string(code)}, {"message", message}}}});
}

std::int64_t query_int(const httplib::Request& req, const char* name)
{
    if (!req.has_param(name)) {
        throw CmsError(CmsError::Code::BadRequest, std::string("missing query parameter ") + name);
    }
    const std::string text = req.get_param_value(name);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw CmsError(CmsError::Code::BadRequest, std::string("bad integer for ") + name + ": " + text);
    }
    return v;
}

// Runs a handler, translating failures into error responses.
template <typename F>
httplib::Server::Handler guarded(F&& f)
{
    return [f = std::forward<F>(f)](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const CmsError& e) {
            reply_error(res, e.code(), e.what());
        } catch (const json::exception& e) {
            reply_error(res, CmsError::Code::BadRequest, e.what());
        } catch (const std::invalid_argument& e) {
            reply_error(res, CmsError::Code::BadRequest, e.what());
        }
    };
}

json parse_response(const httplib::Result& result)
{
    if (!result) {
        throw CmsError(CmsError::Code::Transport, "CMS request failed: " + httplib::to_string(result.error()));
    }
    json body;
    try {
        body = json::parse(result->body);
    } catch (const json::exception& e) {
        throw CmsError(CmsError::Code::Transport, std::string("malformed CMS response: ") + e.what());
    }
    if (!body.contains("protocol_version") || body["protocol_version"] != kProtocolVersion) {
        throw CmsError(CmsError::Code::Transport, "CMS protocol version mismatch");
    }
    if (body.contains("error")) {
        const auto& err = body["error"];
        throw CmsError(parse_error_code(err.value("code", "transport")), err.value("message", "CMS error"));
    }
    if (result->status >= 300) {
        throw CmsError(CmsError::Code::Transport, "CMS returned HTTP " + std::to_string(result->status));
    }
    return body;
}

}  // namespace

CmsHttpServer::CmsHttpServer(CommunityMonitor& monitor)
    : monitor_(monitor), server_(std::make_unique<httplib::Server>())
{
    auto& s = *server_;
    s.set_tcp_nodelay(true);
    s.Post("/agents", guarded([this](const httplib::Request& req, httplib::Response& res) {
               const auto body = json::parse(req.body);
               const auto token = monitor_.join(body.at("agent_id").get<std::string>());
               reply(res, 201, json{{"agent_id", token.agent_id}, {"sequence", token.sequence}});
           }));
    s.Delete(R"(/agents/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const std::string id = req.matches[1];
                 monitor_.leave(id);
                 reply(res, 200, json{{"left", id}});
             }));
    s.Get("/agents", guarded([this](const httplib::Request&, httplib::Response& res) {
              reply(res, 200, json{{"agents", monitor_.list()}});
          }));
    s.Post("/status", guarded([this](const httplib::Request& req, httplib::Response& res) {
               const auto body = json::parse(req.body);
               StatusReport r;
               r.agent_id = body.at("agent_id").get<std::string>();
               r.slot = body.at("slot").get<std::int64_t>();
               r.consumed = body.at("consumed").get<double>();
               r.generated = body.at("generated").get<double>();
               monitor_.post_status(r);
               reply(res, 200, json{{"ack", true}});
           }));
    s.Get("/community/status", guarded([this](const httplib::Request& req, httplib::Response& res) {
              const auto slot = query_int(req, "slot");
              reply(res, 200, json{{"slot", slot}, {"status_kwh", monitor_.community_status(slot)}});
          }));
    s.Get("/community/reward", guarded([this](const httplib::Request& req, httplib::Response& res) {
              if (req.has_param("first")) {
                  const auto first = query_int(req, "first");
                  const auto last = query_int(req, "last");
                  reply(res, 200,
                        json{{"first", first}, {"last", last}, {"reward", monitor_.episode_reward(first, last)}});
                  return;
              }
              const auto slot = query_int(req, "slot");
              reply(res, 200, json{{"slot", slot}, {"reward", monitor_.global_reward(slot)}});
          }));
}

CmsHttpServer::~CmsHttpServer()
{
    stop();
}

int CmsHttpServer::start(const std::string& host, int port)
{
    int bound = port;
    if (port == 0) {
        bound = server_->bind_to_any_port(host);
    } else if (!server_->bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound <= 0) throw CmsError(CmsError::Code::Transport, "cannot bind CMS server on " + host);
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return bound;
}

bool CmsHttpServer::listen(const std::string& host, int port)
{
    return server_->listen(host, port);
}

void CmsHttpServer::stop()
{
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

RemoteCommunityService::RemoteCommunityService(const std::string& host, int port)
    : client_(std::make_unique<httplib::Client>(host, port))
{
    client_->set_keep_alive(true);
    client_->set_tcp_nodelay(true);
}

RemoteCommunityService::~RemoteCommunityService() = default;

MembershipToken RemoteCommunityService::join(const std::string& agent_id)
{
    const auto body = parse_response(client_->Post("/agents", json{{"agent_id", agent_id}}.dump(), "application/json"));
    return {body.at("agent_id").get<std::string>(), body.at("sequence").get<std::uint64_t>()};
}

void RemoteCommunityService::leave(const std::string& agent_id)
{
    parse_response(client_->Delete("/agents/" + httplib::detail::encode_url(agent_id)));
}

std::vector<std::string> RemoteCommunityService::list()
{
    return parse_response(client_->Get("/agents")).at("agents").get<std::vector<std::string>>();
}

void RemoteCommunityService::post_status(const StatusReport& report)
{
    const json body{{"agent_id", report.agent_id},
                    {"slot", report.slot},
                    {"consumed", report.consumed},
                    {"generated", report.generated}};
    parse_response(client_->Post("/status", body.dump(), "application/json"));
}

Kwh RemoteCommunityService::community_status(std::int64_t slot)
{
    return parse_response(client_->Get("/community/status?slot=" + std::to_string(slot)))
        .at("status_kwh")
        .get<double>();
}

double RemoteCommunityService::global_reward(std::int64_t slot)
{
    return parse_response(client_->Get("/community/reward?slot=" + std::to_string(slot))).at("reward").get<double>();
}

double RemoteCommunityService::episode_reward(std::int64_t first_slot, std::int64_t last_slot)
{
    return parse_response(client_->Get("/community/reward?first=" + std::to_string(first_slot) +
                                       "&last=" + std::to_string(last_slot)))
        .at("reward")
        .get<double>();
}

}  // namespace zec::cms
