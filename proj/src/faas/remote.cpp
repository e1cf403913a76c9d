#include "edgeflow/faas/remote.hpp"

namespace edgeflow::faas {

EndpointServer::EndpointServer(Endpoint& endpoint, const std::string& socket_path)
    : endpoint_(endpoint), socket_path_(socket_path), listener_(socket_path) {
  accept_thread_ = std::thread([this] { accept_loop(); });
}

EndpointServer::~EndpointServer() { stop(); }

void EndpointServer::stop() {
  if (!running_.exchange(false)) return;
  listener_.close();
  accept_thread_.join();
  std::lock_guard<std::mutex> g(conns_mu_);
  for (auto& weak : conns_)
    if (auto conn = weak.lock()) conn->shutdown();
  for (auto& t : conn_threads_) t.join();
  conn_threads_.clear();
  conns_.clear();
}

void EndpointServer::accept_loop() {
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

void EndpointServer::serve(std::shared_ptr<util::SocketStream> conn) {
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
      if (op == "REGISTER") {
        FunctionBody body = FunctionBody::from_json(frame.header.at("body"));
        reply = {{"ok", true}, {"function_id", endpoint_.register_function(body)}};
      } else if (op == "INVOKE") {
        std::string task_id =
            endpoint_.invoke(frame.header.at("function_id").get<std::string>(),
                             frame.header.value("args", Json::object()),
                             frame.header.value("idempotency_key", ""));
        reply = {{"ok", true}, {"task_id", task_id}};
      } else if (op == "POLL") {
        TaskRecord rec = endpoint_.poll(frame.header.at("task_id").get<std::string>());
        reply = {{"ok", true}, {"task", rec.to_json()}};
      } else if (op == "CAPACITY") {
        CapacityReport cap = endpoint_.capacity();
        reply = {{"ok", true},
                 {"endpoint_id", cap.info.endpoint_id},
                 {"site", cap.info.site},
                 {"capacity", cap.info.capacity},
                 {"mode", cap.info.mode},
                 {"running", cap.running},
                 {"queued", cap.queued}};
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

EndpointClient::EndpointClient(const std::string& socket_path)
    : conn_(util::unix_connect(socket_path)) {}

Json EndpointClient::call(const Json& request) {
  std::lock_guard<std::mutex> g(mu_);
  util::send_frame(*conn_, request);
  util::Frame frame;
  if (!util::recv_frame(*conn_, frame)) throw NetError("endpoint closed the connection");
  if (!frame.header.value("ok", false)) {
    std::string error = frame.header.value("error", "unknown endpoint error");
    if (error.find("unknown function") != std::string::npos ||
        error.find("unknown task") != std::string::npos)
      throw NotFoundError(error);
    throw NetError(error);
  }
  return frame.header;
}

std::string EndpointClient::register_function(const FunctionBody& body) {
  return call({{"op", "REGISTER"}, {"body", body.to_json()}})["function_id"];
}

std::string EndpointClient::invoke(const std::string& function_id, const Json& args,
                                   const std::string& idempotency_key) {
  Json req = {{"op", "INVOKE"}, {"function_id", function_id}, {"args", args}};
  if (!idempotency_key.empty()) req["idempotency_key"] = idempotency_key;
  return call(req)["task_id"];
}

TaskRecord EndpointClient::poll(const std::string& task_id) {
  return task_record_from_json(call({{"op", "POLL"}, {"task_id", task_id}})["task"]);
}

Json EndpointClient::capacity() { return call({{"op", "CAPACITY"}}); }

TaskRecord task_record_from_json(const Json& j) {
  TaskRecord rec;
  rec.task_id = j.value("task_id", "");
  rec.function_id = j.value("function_id", "");
  rec.arguments = j.value("arguments", Json::object());
  const std::string state = j.value("state", "queued");
  if (state == "queued") rec.state = TaskState::Queued;
  else if (state == "running") rec.state = TaskState::Running;
  else if (state == "done") rec.state = TaskState::Done;
  else if (state == "error") rec.state = TaskState::Error;
  else throw ParseError("", "unknown task state '" + state + "'");
  rec.exit_code = j.value("exit_code", 0);
  rec.output = j.value("output", Json::object());
  rec.error = j.value("error", "");
  rec.submitted_ns = j.value("submitted_ns", static_cast<std::int64_t>(-1));
  rec.start_ns = j.value("start_ns", static_cast<std::int64_t>(-1));
  rec.end_ns = j.value("end_ns", static_cast<std::int64_t>(-1));
  return rec;
}

}  // namespace edgeflow::faas
