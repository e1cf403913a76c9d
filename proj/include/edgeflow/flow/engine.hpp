#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "edgeflow/flow/provider.hpp"
#include "edgeflow/flow/runlog.hpp"
#include "edgeflow/flow/types.hpp"
#include "edgeflow/util/clock.hpp"
#include "edgeflow/util/ids.hpp"

namespace edgeflow::flow {

struct EngineOptions {
  std::string log_dir;  // required; one JSONL file per run
  std::int64_t poll_interval_ns = 1'000'000;  // real-clock wait between polls
  bool recover = true;  // replay existing logs on construction
};

struct CancelAck {
  bool already_terminal = false;
  RunStatus status = RunStatus::Active;
};

// Drives flows to completion against registered action providers.
//
// Delivery is at-least-once: the engine persists "dispatched" before it
// calls the provider, and after a crash it re-dispatches the same attempt
// key; providers deduplicate. Many runs may progress concurrently; the
// actions inside one run are strictly sequential.
class Engine {
public:
  Engine(util::Clock& clock, ProviderMap providers, EngineOptions options,
         std::shared_ptr<util::IdGen> ids = nullptr);

  // Validates input against the flow's $input references, persists the run
  // record, and returns without dispatching anything. A repeated
  // idempotency key returns the original run id.
  std::string start_run(const FlowDefinition& flow, const Json& input,
                        const std::string& idempotency_key = "");

  // Performs at most one state-machine step (dispatch, poll, transition,
  // finalize). Returns true if anything changed.
  bool advance(const std::string& run_id);

  // Repeats advance until the run is terminal. Under a virtual clock this
  // advances time to the next provider event or retry timer; a missing
  // next event with a non-terminal run is a deadlock and throws.
  RunRecord run_to_completion(const std::string& run_id);

  RunRecord get_status(const std::string& run_id) const;
  CancelAck cancel(const std::string& run_id);

  std::vector<std::string> active_runs() const;
  // One advance pass over every active run; true if any progressed.
  bool advance_all();
  // Earliest retry timer over active runs (virtual-clock drivers add
  // provider events themselves).
  std::optional<std::int64_t> next_timer_ns() const;
  std::optional<std::int64_t> next_provider_event_ns() const;

  RunLogWriter& log_writer() { return log_; }
  const std::string& log_dir() const { return log_.dir(); }

private:
  struct RunState {
    mutable std::mutex mu;
    FlowDefinition flow;
    RunRecord record;
    std::string current;  // state name; empty once terminal
    ActionState action_state = ActionState::Pending;
    int attempt = 0;
    std::string idem_key;
    std::string handle;        // provider handle for the in-flight attempt
    bool have_handle = false;
    std::int64_t not_before_ns = 0;  // retry backoff gate
    std::int64_t attempt_started_ns = -1;
    bool cancel_requested = false;
  };

  bool advance_locked(const std::string& run_id, RunState& run);
  void persist_action(RunState& run, const ActionSpec& spec, ActionState from, ActionState to,
                      const Json& extra);
  void finalize(RunState& run, RunStatus status);
  void enter_state(RunState& run, const std::string& name);
  void complete_attempt(RunState& run, const ActionSpec& spec, const PollResult& result);
  void fail_attempt(RunState& run, const ActionSpec& spec, const std::string& error,
                    std::int64_t start_ns, std::int64_t end_ns);
  void do_cancel(RunState& run);
  ActionProvider* provider_for(const std::string& id) const;
  ActionLogEntry& entry_for(RunState& run, const ActionSpec& spec);
  void restore_from_logs();

  util::Clock& clock_;
  ProviderMap providers_;
  EngineOptions options_;
  std::shared_ptr<util::IdGen> ids_;
  RunLogWriter log_;

  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<RunState>> runs_;
  std::map<std::string, std::string> start_keys_;
};

}  // namespace edgeflow::flow
