#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "colier/server/server.hpp"

namespace colier::server {

struct NetOptions {
  std::string address = "0.0.0.0";
  unsigned short port = 8080;  // 0 picks a free port
  std::filesystem::path webRoot;  // static bundle; empty disables it
  bool handleSignals = false;     // stop on SIGINT / SIGTERM
};

/// WebSocket endpoint /ws plus plain HTTP:
///   GET  /                         static files from webRoot
///   GET  /assets/<session>/<file>  layer bitmaps; <layerId>.png resolves
///                                  through the layer's asset reference
///   PUT  /assets/<session>/<name>.png  upload a bitmap (validated PNG)
///   GET  /render/<session>.png     current composite
/// One I/O thread drives both the sockets and the Server core.
class NetServer {
 public:
  /// Binds immediately; throws std::runtime_error on failure.
  NetServer(Server& core, NetOptions options);
  ~NetServer();

  unsigned short port() const;

  /// Serves until stop(); autosaves every session on the way out.
  void run();
  /// Safe to call from any thread.
  void stop();

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace colier::server
