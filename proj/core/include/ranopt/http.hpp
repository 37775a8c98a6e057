// SPDX-License-Identifier: Apache-2.0
//
// HTTP+JSON front of OptimizerService.
//
//   POST /projects
//   GET  /projects/{id}
//   POST /projects/{id}/analyze
//   GET  /projects/{id}/snapshot/{sid}
//   GET  /projects/{id}/snapshot/{sid}/{section}
//   POST /projects/{id}/actions
//   GET  /projects/{id}/actions
//   GET  /projects/{id}/timeseries?cell=&metric=&granularity=&from=&to=&snapshot=
//   GET  /projects/{id}/geo?cell=&points=
//
// Errors are {"error": <code>, "message": <text>} with 400 (validation,
// invalid_argument), 404 (not_found), 405, 409 (conflict), 422 (data
// insufficient for the request) or 500.

#pragma once

#include <map>
#include <memory>
#include <string>
#include <thread>

#include "ranopt/service.hpp"

namespace ranopt {

struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string body;  // JSON
};

/// Transport-independent routing; never throws.
HttpResponse handle_request(OptimizerService& service, const HttpRequest& request);

/// Serves handle_request over HTTP on a worker pool.
class HttpServer {
 public:
  explicit HttpServer(OptimizerService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds and serves on a background thread; port 0 picks a free port.
  /// Returns the bound port. Throws Error(io_error) when binding fails.
  int start(const std::string& host, int port);
  /// Binds and serves on the calling thread until stop() is called.
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ranopt
