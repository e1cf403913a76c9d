#pragma once

#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "edgeflow/faas/types.hpp"
#include "edgeflow/util/clock.hpp"
#include "edgeflow/util/ids.hpp"

namespace edgeflow::faas {

// Function-serving endpoint: register bodies, invoke fire-and-forget, poll
// results. A bounded pool of W slots executes task bodies FIFO.
//
// In "real" mode W worker threads run commands as subprocesses. In
// "simulated" mode execution is bookkeeping against the supplied clock:
// invoke consumes no time, a task occupies a slot for exactly its
// registered duration, and completions are processed by tick().
class Endpoint {
public:
  // state_dir persists the function registry ("" = volatile).
  Endpoint(EndpointInfo info, util::Clock& clock, std::string state_dir = "",
           std::shared_ptr<util::IdGen> ids = nullptr);
  ~Endpoint();

  Endpoint(const Endpoint&) = delete;
  Endpoint& operator=(const Endpoint&) = delete;

  std::string register_function(const FunctionBody& body);
  FunctionRegistration function(const std::string& function_id) const;

  // Returns immediately with a task id. A repeated idempotency key returns
  // the original task without re-execution.
  std::string invoke(const std::string& function_id, const Json& args,
                     const std::string& idempotency_key = "");

  TaskRecord poll(const std::string& task_id);
  CapacityReport capacity() const;
  void purge_completed();

  // Simulated mode: process admissions/completions up to now; earliest
  // pending completion time for event-driven drivers.
  void tick(std::int64_t now_ns);
  std::optional<std::int64_t> next_transition_ns() const;

  // Fault hook: fail everything currently running (endpoint crash) and
  // reject dispatches until revived.
  void fail_running(const std::string& reason, std::int64_t at_ns);
  void set_down(bool down) { std::lock_guard<std::mutex> g(mu_); down_ = down; }
  bool is_down() const { std::lock_guard<std::mutex> g(mu_); return down_; }

  std::vector<TaskTransition> transition_log() const;
  const EndpointInfo& info() const { return info_; }

  void shutdown();

private:
  struct Task {
    TaskRecord record;
    FunctionBody body;
    std::int64_t seq = 0;
  };

  void transition(Task& task, TaskState to, std::int64_t ts_ns);
  void admit_locked(std::int64_t now_ns);
  void complete_due_locked(std::int64_t now_ns);
  void worker_loop();
  void run_subprocess(Task& task);
  void load_registry();
  void persist_function(const FunctionRegistration& reg);
  static std::string render_command(const std::string& tmpl, const Json& args);

  EndpointInfo info_;
  util::Clock& clock_;
  std::string state_dir_;
  std::shared_ptr<util::IdGen> ids_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::string, FunctionRegistration> functions_;
  std::map<std::string, Task> tasks_;
  std::map<std::string, std::string> idempotency_;  // key -> task_id
  std::deque<std::string> queue_;                   // FIFO
  std::vector<std::string> running_;                // task ids
  std::vector<TaskTransition> log_;
  std::int64_t next_seq_ = 0;
  bool down_ = false;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
};

}  // namespace edgeflow::faas
