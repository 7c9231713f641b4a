#pragma once

// Stateless JSON-over-HTTP facade. Every handler parses the body, calls the
// matching api::run_* function and writes its JSON back.
//
//   400  domain error (structured error payload)
//   422  malformed body (bad JSON, missing fields, wrong shapes)

#include <filesystem>
#include <functional>
#include <memory>
#include <string>

#include "httplib.h"
#include "json.hpp"

#include "greyahp/api.hpp"
#include "greyahp/error.hpp"

namespace greyahp::service {

using api::json;

namespace detail {

inline void write_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline httplib::Server::Handler json_endpoint(std::function<json(const json&)> fn) {
  return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error& e) {
      write_json(res, 422, api::error_payload(Error(ErrorCode::BadRequest,
                                                    std::string("malformed JSON: ") + e.what())));
      return;
    }
    try {
      write_json(res, 200, fn(body));
    } catch (const Error& e) {
      write_json(res, e.code() == ErrorCode::BadRequest ? 422 : 400, api::error_payload(e));
    } catch (const json::exception& e) {
      write_json(res, 422, api::error_payload(Error(ErrorCode::BadRequest, e.what())));
    }
  };
}

}  // namespace detail

/// Registers the /api routes and, when `static_dir` exists, serves it at "/".
inline void install_routes(httplib::Server& server, const std::filesystem::path& static_dir = {}) {
  server.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
    detail::write_json(res, 200, api::health());
  });
  server.Post("/api/ahp", detail::json_endpoint([](const json& j) {
                return api::run_ahp(api::ahp_request_from_json(j));
              }));
  server.Post("/api/allocate", detail::json_endpoint([](const json& j) {
                return api::run_allocate(api::allocate_request_from_json(j));
              }));
  server.Post("/api/forecast", detail::json_endpoint([](const json& j) {
                return api::run_forecast(api::forecast_request_from_json(j));
              }));
  server.Post("/api/sensitivity", detail::json_endpoint([](const json& j) {
                return api::run_sensitivity(api::sensitivity_request_from_json(j));
              }));
  server.Post("/api/simulate", detail::json_endpoint([](const json& j) {
                return api::run_simulate(api::simulate_request_from_json(j));
              }));
  if (!static_dir.empty() && std::filesystem::is_directory(static_dir)) {
    server.set_mount_point("/", static_dir.string());
  }
}

inline std::unique_ptr<httplib::Server> make_server(const std::filesystem::path& static_dir = {}) {
  auto server = std::make_unique<httplib::Server>();
  install_routes(*server, static_dir);
  return server;
}

}  // namespace greyahp::service
