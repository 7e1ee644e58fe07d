#pragma once

#include "imhotep/service/session.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace imhotep {

inline constexpr std::uint16_t kDefaultPort = 7761;

struct ServerConfig {
  std::string address = "0.0.0.0";
  std::uint16_t port = kDefaultPort;  // 0 picks an ephemeral port
  std::size_t workers = 0;            // shared pool; 0 = hardware concurrency
  SessionConfig session;
  /// Loaded once at start; every new connection begins with it installed.
  std::optional<std::filesystem::path> patient;
};

/// WebSocket front end. Text frames carry JSON commands and replies,
/// binary frames carry FramePackets. Each connection has its own thread
/// that owns the session (its coordination context); loads and renders go
/// to one executor shared by all connections.
class Server {
 public:
  explicit Server(ServerConfig config);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Loads the configured patient and binds. Throws BindFailure, or the
  /// loader's error for a bad patient directory.
  void start();

  /// Actual listening port (after start()).
  std::uint16_t port() const;

  /// Blocks until stop() is called from another thread.
  void wait();

  /// Closes the listener and every connection; idempotent.
  void stop();

  std::size_t connection_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace imhotep
