#include <atomic>
#include <charconv>
#include <stdexcept>

// Eigen (via triage.hpp) must precede httplib.h: <resolv.h> defines a `_res`
// macro that collides with Eigen parameter names.
#include "chemid/triage.hpp"

#include <httplib.h>

namespace chemid {

namespace {

using json = nlohmann::json;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message, const json& metadata) {
  send_json(res, status, json{{"error", message}, {"model", metadata}});
}

}  // namespace

struct TriageHttpServer::Impl {
  std::shared_ptr<TriageService> service;
  HttpOptions options;
  httplib::Server server;
  std::atomic<bool> bound{false};

  void install_routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", options.cors_origin},
                                {"Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});

    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200,
                json{{"status", "ok"}, {"sessions", service->live_sessions()}, {"model", service->metadata()}});
    });

    server.Get("/symptoms", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200,
                json{{"symptoms", service->models().db->symptom_names()}, {"model", service->metadata()}});
    });

    server.Post("/sessions", [this](const httplib::Request&, httplib::Response& res) {
      const std::string id = service->create_session();
      json body = view_to_json(service->get_candidates(id), *service->models().db, service->metadata());
      body["session_id"] = id;
      send_json(res, 201, body);
    });

    server.Put(R"(/sessions/([0-9a-f]+)/observations/([^/]+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 const std::string id = req.matches[1];
                 const std::string index_text = req.matches[2];
                 std::size_t index = 0;
                 const auto* end = index_text.data() + index_text.size();
                 const auto [ptr, ec] = std::from_chars(index_text.data(), end, index);
                 if (ec != std::errc() || ptr != end) {
                   send_error(res, 400, "symptom index must be a non-negative integer", service->metadata());
                   return;
                 }
                 json body;
                 try {
                   body = json::parse(req.body);
                 } catch (const json::parse_error&) {
                   send_error(res, 400, "request body must be JSON", service->metadata());
                   return;
                 }
                 if (!body.is_object() || !body.contains("state") || !body["state"].is_string()) {
                   send_error(res, 400, "request body needs a string 'state'", service->metadata());
                   return;
                 }
                 const auto state = parse_observation(body["state"].get<std::string>());
                 if (!state) {
                   send_error(res, 400, "state must be present, absent or unknown", service->metadata());
                   return;
                 }
                 try {
                   json out = view_to_json(service->record_observation(id, index, *state), *service->models().db,
                                           service->metadata());
                   out["session_id"] = id;
                   send_json(res, 200, out);
                 } catch (const SessionNotFound& e) {
                   send_error(res, 404, e.what(), service->metadata());
                 } catch (const std::out_of_range& e) {
                   send_error(res, 400, e.what(), service->metadata());
                 }
               });

    server.Get(R"(/sessions/([0-9a-f]+)/candidates)", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      try {
        json out = view_to_json(service->get_candidates(id), *service->models().db, service->metadata());
        out["session_id"] = id;
        send_json(res, 200, out);
      } catch (const SessionNotFound& e) {
        send_error(res, 404, e.what(), service->metadata());
      }
    });

    server.set_error_handler([this](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty()) send_error(res, res.status, "not found", service->metadata());
    });

    server.set_exception_handler([this](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string message = "internal error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        message = e.what();
      } catch (...) {
      }
      send_error(res, 500, message, service->metadata());
    });
  }
};

TriageHttpServer::TriageHttpServer(std::shared_ptr<TriageService> service, HttpOptions options)
    : impl_(std::make_unique<Impl>()) {
  if (!service) throw std::invalid_argument("triage HTTP server needs an initialised service");
  impl_->service = std::move(service);
  impl_->options = std::move(options);
  impl_->install_routes();
}

TriageHttpServer::~TriageHttpServer() { stop(); }

int TriageHttpServer::bind() {
  int port = impl_->options.port;
  if (port == 0) {
    port = impl_->server.bind_to_any_port(impl_->options.host);
    if (port < 0) throw std::runtime_error("could not bind to any port on " + impl_->options.host);
  } else if (!impl_->server.bind_to_port(impl_->options.host, port)) {
    throw std::runtime_error("could not bind " + impl_->options.host + ":" + std::to_string(port));
  }
  impl_->bound = true;
  return port;
}

void TriageHttpServer::serve() {
  if (!impl_->bound) throw std::logic_error("serve() called before bind()");
  impl_->server.listen_after_bind();
}

void TriageHttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace chemid
