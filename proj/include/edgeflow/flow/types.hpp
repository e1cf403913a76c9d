#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "edgeflow/util/errors.hpp"
#include "edgeflow/util/jsonio.hpp"

namespace edgeflow::flow {

using util::Json;

// Lifecycle of one action attempt. Failed may re-enter Dispatched while
// attempts remain.
enum class ActionState { Pending, Dispatched, Running, Succeeded, Failed, Cancelled };

const char* to_string(ActionState s);
ActionState action_state_from_string(const std::string& s);
bool is_terminal(ActionState s);
// The transition relation; attempt bookkeeping is checked separately.
bool legal_transition(ActionState from, ActionState to);

enum class ActionKind { Transfer, Compute, Choice, Succeed, Fail };

const char* to_string(ActionKind k);
ActionKind action_kind_from_string(const std::string& s);
bool is_terminal(ActionKind k);

enum class ChoiceOp { Lt, Le, Eq, Ge, Gt };

// Comparison between a numeric field of a prior action's output and a
// literal.
struct ChoiceSpec {
  std::string source_state;
  std::string field;
  ChoiceOp op = ChoiceOp::Lt;
  double literal = 0.0;
  std::string if_true;
  std::string if_false;
};

struct ActionSpec {
  std::string name;
  ActionKind kind = ActionKind::Compute;
  std::string provider;              // endpoint or service id
  Json params;                       // template; $input.<key> references
  std::string next;                  // empty only for terminal states
  std::string on_failure;            // empty: run fails when retries exhaust
  int max_retries = 3;               // total attempts for this action
  std::int64_t retry_backoff_ns = 1'000'000'000;  // doubles per retry
  std::optional<ChoiceSpec> choice;  // kind == Choice
  std::string phase;                 // optional reporting tag (data/train/model)
};

struct FlowDefinition {
  std::string flow_id;
  std::string start;
  std::vector<ActionSpec> states;  // document order
  Json source;                     // original document, persisted with runs

  const ActionSpec* find(const std::string& name) const;
  const ActionSpec& at(const std::string& name) const;
  // States reachable from start, in a deterministic order.
  std::vector<std::string> reachable() const;
  // Non-terminal states along the all-success path from start.
  std::vector<std::string> happy_path() const;
  // $input.<key> names referenced by reachable states.
  std::vector<std::string> required_input_keys() const;
};

enum class RunStatus { Active, Succeeded, Failed, Cancelled };

const char* to_string(RunStatus s);
RunStatus run_status_from_string(const std::string& s);
bool is_terminal(RunStatus s);

// One executed action (all attempts folded into a single entry).
struct ActionLogEntry {
  std::string state_name;
  ActionKind kind = ActionKind::Compute;
  std::string phase;
  ActionState action_state = ActionState::Pending;
  int attempts = 0;
  std::int64_t start_ns = -1;  // first dispatch
  std::int64_t end_ns = -1;    // final completion
  std::int64_t busy_ns = 0;    // sum of attempt execution times
  Json output;
  std::string error;
};

struct RunRecord {
  std::string run_id;
  std::string flow_id;
  Json input;
  RunStatus status = RunStatus::Active;
  std::int64_t created_ns = 0;
  std::int64_t finished_ns = -1;
  std::vector<ActionLogEntry> actions;

  bool terminal() const { return is_terminal(status); }
  // User-visible duration: last action end (or finalize time) - creation.
  std::int64_t end_to_end_ns() const;
  // Sum of action execution times.
  std::int64_t busy_ns() const;
  // Time not spent inside actions (dispatch latency, retry backoff).
  std::int64_t orchestration_ns() const { return end_to_end_ns() - busy_ns(); }

  Json to_json() const;
};

}  // namespace edgeflow::flow
