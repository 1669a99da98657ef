#include "mowplan/service.hpp"

#include <cinttypes>
#include <cstdio>

#include "httplib.h"

namespace mowplan::service {

using nlohmann::json;

namespace {

Reply error_reply(int status, const std::string& kind, const std::string& stage, const std::string& message) {
  json body = {{"error", kind}, {"message", message}};
  if (!stage.empty()) body["stage"] = stage;
  return {status, "application/json", body.dump()};
}

int status_for(ErrorKind kind) {
  switch (io::exit_code(kind)) {
    case 2:
    case 3: return 400;
    case 4: return 422;
    default: return 500;
  }
}

json response_json(const std::string& id, const io::PipelineResult& r) {
  json per_angle = json::array();
  for (const auto& [angle, count] : r.per_angle) per_angle.push_back({{"angle", angle}, {"region_count", count}});
  json wpts = json::array();
  for (const auto& w : r.waypoints) {
    wpts.push_back({{"lat", w.p.lat}, {"lon", w.p.lon}, {"mode", pathgen::to_string(w.mode)}});
  }
  return {{"id", id},
          {"plan", io::plan_json(r.plan)},
          {"metrics", io::metrics_json(r.metrics)},
          {"decomposition",
           {{"theta", r.decomp.theta}, {"region_count", r.decomp.region_count}, {"per_angle", per_angle}}},
          {"waypoints", wpts},
          {"warnings", r.warnings}};
}

}  // namespace

std::string content_hash(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

PlanService::PlanService(std::size_t cache_capacity) : capacity_(std::max<std::size_t>(1, cache_capacity)) {}

std::shared_ptr<const PlanService::Entry> PlanService::find(const std::string& id) {
  std::lock_guard lock(mu_);
  const auto it = index_.find(id);
  if (it == index_.end()) return nullptr;
  lru_.splice(lru_.begin(), lru_, it->second);
  return it->second->second;
}

void PlanService::insert(const std::string& id, std::shared_ptr<const Entry> entry) {
  std::lock_guard lock(mu_);
  last_id_ = id;
  if (const auto it = index_.find(id); it != index_.end()) {
    lru_.splice(lru_.begin(), lru_, it->second);
    return;
  }
  lru_.emplace_front(id, std::move(entry));
  index_[id] = lru_.begin();
  while (lru_.size() > capacity_) {
    index_.erase(lru_.back().first);
    lru_.pop_back();
  }
}

std::size_t PlanService::cached() const {
  std::lock_guard lock(mu_);
  return lru_.size();
}

Reply PlanService::plan(const std::string& body) {
  geo::GeoPolygon polygon;
  io::JobConfig config;
  std::vector<std::string> warnings;
  try {
    const json req = json::parse(body);
    if (!req.is_object() || !req.contains("polygon")) {
      throw PlanningError(ErrorKind::kParse, "request needs a \"polygon\" member");
    }
    polygon = io::parse_boundary(req["polygon"], &warnings);
    if (req.contains("config")) config = io::apply_config(config, req["config"]);
    config.validate();
  } catch (const json::exception& e) {
    return error_reply(400, to_string(ErrorKind::kParse), "request", e.what());
  } catch (const PlanningError& e) {
    return error_reply(400, to_string(e.kind()), "request", e.what());
  }

  const std::string id =
      content_hash(json{{"polygon", io::boundary_json(polygon)}, {"config", io::config_json(config)}}.dump());
  if (auto hit = find(id)) {
    insert(id, hit);
    return {200, "application/json", hit->response};
  }
  try {
    io::PipelineResult r = io::run_pipeline(config, polygon);
    r.warnings.insert(r.warnings.begin(), warnings.begin(), warnings.end());
    auto entry = std::make_shared<Entry>(Entry{response_json(id, r).dump(), std::move(r.waypoints)});
    insert(id, entry);
    return {200, "application/json", entry->response};
  } catch (const PlanningError& e) {
    return error_reply(status_for(e.kind()), to_string(e.kind()), e.stage(), e.what());
  } catch (const std::exception& e) {
    return error_reply(500, "internal", "", e.what());
  }
}

Reply PlanService::export_plan(const std::string& id, const std::string& format) {
  const auto fmt = io::parse_export_format(format.empty() ? "geojson" : format);
  if (!fmt) return error_reply(400, "invalid_input", "export", "format must be geojson or csv");
  std::string key = id;
  if (key.empty()) {
    std::lock_guard lock(mu_);
    key = last_id_;
  }
  const auto entry = key.empty() ? nullptr : find(key);
  if (!entry) return error_reply(404, "not_found", "export", "unknown plan id");
  if (entry->waypoints.empty()) return error_reply(422, "invalid_input", "export", "plan has no waypoints");
  return {200, *fmt == io::ExportFormat::kCsv ? "text/csv" : "application/geo+json",
          io::format_waypoints(entry->waypoints, *fmt)};
}

Reply PlanService::health() const { return {200, "application/json", R"({"status":"ok"})"}; }

struct Server::Impl {
  ServerOptions options;
  PlanService service;
  httplib::Server http;
  int port = -1;

  explicit Impl(ServerOptions o) : options(std::move(o)), service(options.cache_capacity) {
    http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
    auto send = [](httplib::Response& res, const Reply& r) {
      res.status = r.status;
      res.set_content(r.body, r.content_type.c_str());
    };
    http.Post("/api/plan", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, service.plan(req.body));
    });
    http.Get("/api/health", [this, send](const httplib::Request&, httplib::Response& res) {
      send(res, service.health());
    });
    http.Get("/api/export", [this, send](const httplib::Request& req, httplib::Response& res) {
      const std::string format = req.get_param_value("format");
      const Reply r = service.export_plan(req.get_param_value("id"), format);
      send(res, r);
      if (r.status == 200) {
        res.set_header("Content-Disposition",
                       std::string("attachment; filename=\"waypoints.") + (format == "csv" ? "csv" : "geojson") + "\"");
      }
    });
    http.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    if (!options.static_dir.empty()) http.set_mount_point("/", options.static_dir);
  }
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}
Server::~Server() { stop(); }

int Server::bind() {
  const auto& o = impl_->options;
  impl_->port = o.port == 0 ? impl_->http.bind_to_any_port(o.host) : (impl_->http.bind_to_port(o.host, o.port) ? o.port : -1);
  if (impl_->port < 0) {
    throw PlanningError(ErrorKind::kIo, "cannot bind " + o.host + ":" + std::to_string(o.port));
  }
  return impl_->port;
}

void Server::listen() {
  if (impl_->port < 0) bind();
  impl_->http.listen_after_bind();
}

void Server::stop() {
  if (impl_->http.is_running()) impl_->http.stop();
}

bool Server::running() const { return impl_->http.is_running(); }

}  // namespace mowplan::service
