#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "edgeflow/flow/engine.hpp"
#include "edgeflow/util/frame.hpp"

namespace edgeflow::flow {

// Engine control surface: length-prefixed JSON frames over a local socket.
// Ops: START (flow document + input), STATUS, CANCEL, LIST. A driver
// thread advances active runs so clients only observe.
class EngineServer {
public:
  EngineServer(Engine& engine, const std::string& socket_path);
  ~EngineServer();
  void stop();
  const std::string& socket_path() const { return socket_path_; }

private:
  void accept_loop();
  void drive_loop();
  void serve(std::shared_ptr<util::SocketStream> conn);

  Engine& engine_;
  std::string socket_path_;
  util::UnixListener listener_;
  std::atomic<bool> running_{true};
  std::thread accept_thread_;
  std::thread drive_thread_;
  std::mutex conns_mu_;
  std::vector<std::thread> conn_threads_;
  std::vector<std::weak_ptr<util::SocketStream>> conns_;
};

class EngineClient {
public:
  explicit EngineClient(const std::string& socket_path);

  std::string start_run(const Json& flow_doc, const Json& input,
                        const std::string& idempotency_key = "");
  Json status(const std::string& run_id);
  Json cancel(const std::string& run_id);
  std::vector<std::string> list_active();

private:
  Json call(const Json& request);
  std::unique_ptr<util::SocketStream> conn_;
  std::mutex mu_;
};

}  // namespace edgeflow::flow
