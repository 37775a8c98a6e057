// SPDX-License-Identifier: Apache-2.0

#include "ranopt/http.hpp"

#include <charconv>
#include <vector>

#include "httplib.h"
#include "json_io.hpp"
#include "ranopt/error.hpp"

namespace ranopt {

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    const auto j = path.find('/', i);
    const auto end = j == std::string::npos ? path.size() : j;
    if (end > i) parts.push_back(path.substr(i, end - i));
    i = end;
  }
  return parts;
}

HttpResponse error_response(int status, std::string_view code, const std::string& message) {
  return {status, json{{"error", code}, {"message", message}}.dump()};
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::validation:
    case ErrorCode::invalid_argument:
    case ErrorCode::scenario_mismatch: return 400;
    case ErrorCode::not_found: return 404;
    case ErrorCode::conflict: return 409;
    case ErrorCode::insufficient_data:
    case ErrorCode::out_of_support:
    case ErrorCode::no_geo_data: return 422;
    case ErrorCode::io_error: return 500;
  }
  return 500;
}

const std::string* query_value(const HttpRequest& r, const std::string& key) {
  auto it = r.query.find(key);
  return it == r.query.end() ? nullptr : &it->second;
}

EpochSeconds parse_epoch(const std::string& text, const char* name) {
  EpochSeconds v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::invalid_argument, std::string(name) + " must be epoch seconds, got " + text);
  }
  return v;
}

TimeSeriesQuery timeseries_query(const std::string& project_id, const HttpRequest& r) {
  TimeSeriesQuery q;
  q.project_id = project_id;
  const auto* cell = query_value(r, "cell");
  if (!cell || cell->empty()) throw Error(ErrorCode::invalid_argument, "cell is required");
  q.cell_id = *cell;
  if (const auto* m = query_value(r, "metric")) {
    auto metric = metric_from_string(*m);
    if (!metric) throw Error(ErrorCode::invalid_argument, "unknown metric " + *m);
    q.metric = *metric;
  }
  if (const auto* g = query_value(r, "granularity")) {
    auto granularity = granularity_from_string(*g);
    if (!granularity) throw Error(ErrorCode::invalid_argument, "granularity must be hourly or daily");
    q.granularity = *granularity;
  }
  if (const auto* v = query_value(r, "from")) q.from = parse_epoch(*v, "from");
  if (const auto* v = query_value(r, "to")) q.to = parse_epoch(*v, "to");
  if (const auto* v = query_value(r, "snapshot")) q.snapshot_id = *v;
  return q;
}

HttpResponse route(OptimizerService& service, const HttpRequest& r) {
  const auto parts = split_path(r.path);
  const bool get = r.method == "GET";
  const bool post = r.method == "POST";
  auto method_not_allowed = [&] { return error_response(405, "method_not_allowed", r.method + " " + r.path); };

  if (parts.empty() || parts[0] != "projects") return error_response(404, "not_found", "no route for " + r.path);
  if (parts.size() == 1) {
    if (!post) return method_not_allowed();
    const auto project = service.create_project(project_spec_from_json(r.body));
    return {201, to_json(project)};
  }
  const auto& id = parts[1];
  if (parts.size() == 2) {
    if (!get) return method_not_allowed();
    return {200, to_json(service.get_project(id))};
  }
  const auto& leaf = parts[2];
  if (leaf == "analyze" && parts.size() == 3) {
    if (!post) return method_not_allowed();
    const auto result = service.run_analysis(id);
    return {200, json{{"snapshot_id", result.snapshot_id}, {"digest", result.digest}}.dump()};
  }
  if (leaf == "snapshot" && (parts.size() == 4 || parts.size() == 5)) {
    if (!get) return method_not_allowed();
    if (parts.size() == 4) return {200, service.snapshot_document(id, parts[3])};
    return {200, service.snapshot_section(id, parts[3], parts[4])};
  }
  if (leaf == "actions" && parts.size() == 3) {
    if (post) return {201, to_json(service.record_action(id, action_from_json(r.body)))};
    if (!get) return method_not_allowed();
    json list = json::array();
    for (const auto& a : service.journal(id)) list.push_back(json::parse(to_json(a)));
    return {200, list.dump()};
  }
  if (leaf == "timeseries" && parts.size() == 3) {
    if (!get) return method_not_allowed();
    return {200, to_json(service.get_timeseries(timeseries_query(id, r)))};
  }
  if (leaf == "geo" && parts.size() == 3) {
    if (!get) return method_not_allowed();
    OptimizerService::GeoViewOptions options;
    if (const auto* c = query_value(r, "cell")) options.cell_id = *c;
    if (const auto* p = query_value(r, "points")) {
      if (*p != "0" && *p != "1" && *p != "true" && *p != "false") {
        throw Error(ErrorCode::invalid_argument, "points must be 0, 1, true or false");
      }
      options.include_points = *p == "1" || *p == "true";
    }
    return {200, service.geo_view(id, options)};
  }
  return error_response(404, "not_found", "no route for " + r.path);
}

}  // namespace

HttpResponse handle_request(OptimizerService& service, const HttpRequest& request) {
  try {
    return route(service, request);
  } catch (const Error& e) {
    return error_response(status_for(e.code()), to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

struct HttpServer::Impl {
  OptimizerService& service;
  httplib::Server server;
  std::thread thread;

  explicit Impl(OptimizerService& s) : service(s) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      HttpRequest r;
      r.method = req.method;
      r.path = req.path;
      for (const auto& [k, v] : req.params) r.query.emplace(k, v);
      r.body = req.body;
      const auto out = handle_request(service, r);
      res.status = out.status;
      res.set_content(out.body, "application/json");
    };
    server.Get(".*", handler);
    server.Post(".*", handler);
    server.Put(".*", handler);
    server.Delete(".*", handler);
    server.Patch(".*", handler);
  }

  int bind(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
      bound = server.bind_to_any_port(host);
    } else if (!server.bind_to_port(host, port)) {
      bound = -1;
    }
    if (bound <= 0) throw Error(ErrorCode::io_error, "cannot bind " + host + ":" + std::to_string(port));
    return bound;
  }
};

HttpServer::HttpServer(OptimizerService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  const int bound = impl_->bind(host, port);
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::run(const std::string& host, int port) {
  impl_->bind(host, port);
  impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace ranopt
