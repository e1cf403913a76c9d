#include "edgeflow/flow/remote.hpp"

#include "edgeflow/flow/parse.hpp"

namespace edgeflow::flow {

EngineServer::EngineServer(Engine& engine, const std::string& socket_path)
    : engine_(engine), socket_path_(socket_path), listener_(socket_path) {
  accept_thread_ = std::thread([this] { accept_loop(); });
  drive_thread_ = std::thread([this] { drive_loop(); });
}

EngineServer::~EngineServer() { stop(); }

void EngineServer::stop() {
  if (!running_.exchange(false)) return;
  listener_.close();
  accept_thread_.join();
  drive_thread_.join();
  std::lock_guard<std::mutex> g(conns_mu_);
  for (auto& weak : conns_)
    if (auto conn = weak.lock()) conn->shutdown();
  for (auto& t : conn_threads_) t.join();
  conn_threads_.clear();
  conns_.clear();
}

void EngineServer::drive_loop() {
  while (running_) {
    bool progressed = false;
    try {
      progressed = engine_.advance_all();
    } catch (const std::exception&) {
      // A run-level failure surfaces through its record, not the driver.
    }
    if (!progressed)
      std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
}

void EngineServer::accept_loop() {
  while (running_) {
    std::unique_ptr<util::SocketStream> conn;
    try {
      conn = listener_.accept();
    } catch (const NetError&) {
      break;
    }
    if (!conn) break;
    std::shared_ptr<util::SocketStream> shared(conn.release());
    std::lock_guard<std::mutex> g(conns_mu_);
    conns_.push_back(shared);
    conn_threads_.emplace_back([this, shared] { serve(shared); });
  }
}

void EngineServer::serve(std::shared_ptr<util::SocketStream> conn) {
  util::Frame frame;
  while (true) {
    try {
      if (!util::recv_frame(*conn, frame)) return;
    } catch (const NetError&) {
      return;
    }
    Json reply;
    try {
      const std::string op = frame.header.value("op", "");
      if (op == "START") {
        FlowDefinition flow = parse_flow_json(frame.header.at("flow"), "<remote flow>");
        std::string run_id = engine_.start_run(flow, frame.header.value("input", Json::object()),
                                               frame.header.value("idempotency_key", ""));
        reply = {{"ok", true}, {"run_id", run_id}};
      } else if (op == "STATUS") {
        RunRecord rec = engine_.get_status(frame.header.at("run_id").get<std::string>());
        reply = {{"ok", true}, {"record", rec.to_json()}};
      } else if (op == "CANCEL") {
        CancelAck ack = engine_.cancel(frame.header.at("run_id").get<std::string>());
        reply = {{"ok", true},
                 {"already_terminal", ack.already_terminal},
                 {"status", to_string(ack.status)}};
      } else if (op == "LIST") {
        reply = {{"ok", true}, {"active", engine_.active_runs()}};
      } else {
        reply = {{"ok", false}, {"error", "unknown op '" + op + "'"}};
      }
    } catch (const std::exception& e) {
      reply = {{"ok", false}, {"error", e.what()}};
    }
    try {
      util::send_frame(*conn, reply);
    } catch (const NetError&) {
      return;
    }
  }
}

EngineClient::EngineClient(const std::string& socket_path)
    : conn_(util::unix_connect(socket_path)) {}

Json EngineClient::call(const Json& request) {
  std::lock_guard<std::mutex> g(mu_);
  util::send_frame(*conn_, request);
  util::Frame frame;
  if (!util::recv_frame(*conn_, frame)) throw NetError("engine closed the connection");
  if (!frame.header.value("ok", false)) {
    std::string error = frame.header.value("error", "unknown engine error");
    if (error.find("unknown run") != std::string::npos) throw NotFoundError(error);
    throw NetError(error);
  }
  return frame.header;
}

std::string EngineClient::start_run(const Json& flow_doc, const Json& input,
                                    const std::string& idempotency_key) {
  Json req = {{"op", "START"}, {"flow", flow_doc}, {"input", input}};
  if (!idempotency_key.empty()) req["idempotency_key"] = idempotency_key;
  return call(req)["run_id"];
}

Json EngineClient::status(const std::string& run_id) {
  return call({{"op", "STATUS"}, {"run_id", run_id}})["record"];
}

Json EngineClient::cancel(const std::string& run_id) {
  return call({{"op", "CANCEL"}, {"run_id", run_id}});
}

std::vector<std::string> EngineClient::list_active() {
  return call({{"op", "LIST"}})["active"].get<std::vector<std::string>>();
}

}  // namespace edgeflow::flow
