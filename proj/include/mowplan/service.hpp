#pragma once

#include <cstddef>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

#include "mowplan/pipeline.hpp"

namespace mowplan::service {

struct Reply {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Transport-independent request handling with a bounded plan cache keyed by
/// a hash of the normalized polygon and config.
class PlanService {
 public:
  explicit PlanService(std::size_t cache_capacity = 32);

  /// Body: {"polygon": <GeoJSON>, "config": {...}} (config optional).
  Reply plan(const std::string& body);
  /// Empty id means the most recent plan.
  Reply export_plan(const std::string& id, const std::string& format);
  Reply health() const;

  std::size_t cached() const;

 private:
  struct Entry {
    std::string response;
    io::WaypointList waypoints;
  };
  std::shared_ptr<const Entry> find(const std::string& id);
  void insert(const std::string& id, std::shared_ptr<const Entry> entry);

  std::size_t capacity_;
  mutable std::mutex mu_;
  std::list<std::pair<std::string, std::shared_ptr<const Entry>>> lru_;  // front = newest
  std::unordered_map<std::string, decltype(lru_)::iterator> index_;
  std::string last_id_;
};

/// 64-bit FNV-1a as 16 hex digits.
std::string content_hash(const std::string& data);

struct ServerOptions {
  std::string host = "0.0.0.0";
  int port = 8080;  // 0 picks a free port
  std::string static_dir;  // served at / when non-empty
  std::size_t cache_capacity = 32;
};

/// HTTP front end: POST /api/plan, GET /api/health, GET /api/export.
class Server {
 public:
  explicit Server(ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and returns the port; throws kIo on failure.
  int bind();
  /// Blocks until stop().
  void listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mowplan::service
