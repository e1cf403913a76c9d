#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "edgeflow/faas/endpoint.hpp"
#include "edgeflow/util/frame.hpp"

namespace edgeflow::faas {

// Wire protocol: length-prefixed JSON frames over a stream socket.
// Requests carry {"op": "REGISTER" | "INVOKE" | "POLL" | "CAPACITY", ...};
// responses are {"ok": true, ...} or {"ok": false, "error": "..."}.
class EndpointServer {
public:
  EndpointServer(Endpoint& endpoint, const std::string& socket_path);
  ~EndpointServer();
  void stop();
  const std::string& socket_path() const { return socket_path_; }

private:
  void accept_loop();
  void serve(std::shared_ptr<util::SocketStream> conn);

  Endpoint& endpoint_;
  std::string socket_path_;
  util::UnixListener listener_;
  std::atomic<bool> running_{true};
  std::thread accept_thread_;
  std::mutex conns_mu_;
  std::vector<std::thread> conn_threads_;
  std::vector<std::weak_ptr<util::SocketStream>> conns_;
};

class EndpointClient {
public:
  explicit EndpointClient(const std::string& socket_path);

  std::string register_function(const FunctionBody& body);
  std::string invoke(const std::string& function_id, const Json& args,
                     const std::string& idempotency_key = "");
  TaskRecord poll(const std::string& task_id);
  Json capacity();

private:
  Json call(const Json& request);
  std::unique_ptr<util::SocketStream> conn_;
  std::mutex mu_;
};

TaskRecord task_record_from_json(const Json& j);

}  // namespace edgeflow::faas
