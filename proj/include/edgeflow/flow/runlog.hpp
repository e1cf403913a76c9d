#pragma once

#include <functional>
#include <string>
#include <vector>

#include "edgeflow/flow/types.hpp"

namespace edgeflow::flow {

// Append-only run persistence: one JSONL file per run, one record per
// state transition. The log is the source of truth for crash recovery and
// an auditable replay target.
//
// Record kinds:
//   {"kind":"run_created","ts_ns":..,"run_id":..,"flow_id":..,
//    "flow":{..},"input":{..},"idempotency_key":".."}
//   {"kind":"action","ts_ns":..,"state":"..","from":"pending",
//    "to":"dispatched","attempt":1,"idem_key":"..",...}
//   {"kind":"run_finalized","ts_ns":..,"status":"succeeded"}

// Write hook so tests can inject crashes after any persisted record.
using WriteObserver = std::function<void(const std::string& run_id, const Json& record)>;

class RunLogWriter {
public:
  explicit RunLogWriter(std::string dir);

  void append(const std::string& run_id, const Json& record);
  // start_run idempotency index ("starts.jsonl").
  void append_start_key(const std::string& key, const std::string& run_id);

  void set_observer(WriteObserver obs) { observer_ = std::move(obs); }
  const std::string& dir() const { return dir_; }

private:
  std::string dir_;
  WriteObserver observer_;
};

struct ReplayedRun {
  RunRecord record;
  Json flow_source;
  std::string current_state;          // meaningful while Active
  ActionState current_action_state = ActionState::Pending;
  int current_attempt = 0;
  std::string current_idem_key;
};

// Rebuilds run state from a log, enforcing the transition relation and the
// attempt bound as it goes; throws StateError on any illegal record.
ReplayedRun replay_run_log(const std::string& path);

// All "<run_id>.jsonl" logs in a directory.
std::vector<std::string> list_run_logs(const std::string& dir);

// Loads the start-key index; missing file yields an empty map.
std::map<std::string, std::string> load_start_keys(const std::string& dir);

// Validates every run log in a directory; returns the number of logs
// checked, throws StateError on the first violation.
std::size_t validate_run_logs(const std::string& dir);

}  // namespace edgeflow::flow
