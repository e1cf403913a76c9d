#include "edgeflow/flow/types.hpp"

#include <functional>
#include <set>

namespace edgeflow::flow {

const char* to_string(ActionState s) {
  switch (s) {
    case ActionState::Pending: return "pending";
    case ActionState::Dispatched: return "dispatched";
    case ActionState::Running: return "running";
    case ActionState::Succeeded: return "succeeded";
    case ActionState::Failed: return "failed";
    case ActionState::Cancelled: return "cancelled";
  }
  return "?";
}

ActionState action_state_from_string(const std::string& s) {
  if (s == "pending") return ActionState::Pending;
  if (s == "dispatched") return ActionState::Dispatched;
  if (s == "running") return ActionState::Running;
  if (s == "succeeded") return ActionState::Succeeded;
  if (s == "failed") return ActionState::Failed;
  if (s == "cancelled") return ActionState::Cancelled;
  throw ParseError("", "unknown action state '" + s + "'");
}

bool is_terminal(ActionState s) {
  return s == ActionState::Succeeded || s == ActionState::Failed || s == ActionState::Cancelled;
}

bool legal_transition(ActionState from, ActionState to) {
  switch (from) {
    case ActionState::Pending:
      return to == ActionState::Dispatched || to == ActionState::Cancelled;
    case ActionState::Dispatched:
      return to == ActionState::Running || to == ActionState::Cancelled;
    case ActionState::Running:
      return to == ActionState::Succeeded || to == ActionState::Failed ||
             to == ActionState::Cancelled;
    case ActionState::Failed:
      return to == ActionState::Dispatched;  // retry; attempt guard checked elsewhere
    case ActionState::Succeeded:
    case ActionState::Cancelled:
      return false;
  }
  return false;
}

const char* to_string(ActionKind k) {
  switch (k) {
    case ActionKind::Transfer: return "transfer";
    case ActionKind::Compute: return "compute";
    case ActionKind::Choice: return "choice";
    case ActionKind::Succeed: return "succeed";
    case ActionKind::Fail: return "fail";
  }
  return "?";
}

ActionKind action_kind_from_string(const std::string& s) {
  if (s == "transfer") return ActionKind::Transfer;
  if (s == "compute") return ActionKind::Compute;
  if (s == "choice") return ActionKind::Choice;
  if (s == "succeed") return ActionKind::Succeed;
  if (s == "fail") return ActionKind::Fail;
  throw ParseError("", "unknown action kind '" + s + "'");
}

bool is_terminal(ActionKind k) { return k == ActionKind::Succeed || k == ActionKind::Fail; }

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Active: return "active";
    case RunStatus::Succeeded: return "succeeded";
    case RunStatus::Failed: return "failed";
    case RunStatus::Cancelled: return "cancelled";
  }
  return "?";
}

RunStatus run_status_from_string(const std::string& s) {
  if (s == "active") return RunStatus::Active;
  if (s == "succeeded") return RunStatus::Succeeded;
  if (s == "failed") return RunStatus::Failed;
  if (s == "cancelled") return RunStatus::Cancelled;
  throw ParseError("", "unknown run status '" + s + "'");
}

bool is_terminal(RunStatus s) { return s != RunStatus::Active; }

const ActionSpec* FlowDefinition::find(const std::string& name) const {
  for (const auto& s : states)
    if (s.name == name) return &s;
  return nullptr;
}

const ActionSpec& FlowDefinition::at(const std::string& name) const {
  const ActionSpec* s = find(name);
  if (!s) throw NotFoundError("no state '" + name + "' in flow '" + flow_id + "'");
  return *s;
}

std::vector<std::string> FlowDefinition::reachable() const {
  std::vector<std::string> order;
  std::set<std::string> seen;
  std::function<void(const std::string&)> visit = [&](const std::string& name) {
    if (seen.count(name)) return;
    seen.insert(name);
    order.push_back(name);
    const ActionSpec* s = find(name);
    if (!s) return;
    if (s->choice) {
      visit(s->choice->if_true);
      visit(s->choice->if_false);
    } else if (!is_terminal(s->kind)) {
      visit(s->next);
      if (!s->on_failure.empty()) visit(s->on_failure);
    }
  };
  visit(start);
  return order;
}

std::vector<std::string> FlowDefinition::happy_path() const {
  std::vector<std::string> path;
  std::string cur = start;
  while (true) {
    const ActionSpec* s = find(cur);
    if (!s || is_terminal(s->kind)) break;
    path.push_back(cur);
    cur = s->choice ? s->choice->if_true : s->next;
  }
  return path;
}

std::vector<std::string> FlowDefinition::required_input_keys() const {
  std::set<std::string> keys;
  std::function<void(const Json&)> walk = [&](const Json& node) {
    if (node.is_string()) {
      const std::string s = node.get<std::string>();
      size_t pos = 0;
      while ((pos = s.find("$input.", pos)) != std::string::npos) {
        size_t key_start = pos + 7;
        size_t key_end = key_start;
        while (key_end < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[key_end])) || s[key_end] == '_'))
          ++key_end;
        if (key_end > key_start) keys.insert(s.substr(key_start, key_end - key_start));
        pos = key_end;
      }
    } else if (node.is_object() || node.is_array()) {
      for (const auto& child : node) walk(child);
    }
  };
  for (const std::string& name : reachable()) {
    const ActionSpec* s = find(name);
    if (s) walk(s->params);
  }
  return {keys.begin(), keys.end()};
}

std::int64_t RunRecord::end_to_end_ns() const {
  std::int64_t end = finished_ns;
  for (const auto& a : actions) end = std::max(end, a.end_ns);
  return end < created_ns ? 0 : end - created_ns;
}

std::int64_t RunRecord::busy_ns() const {
  std::int64_t total = 0;
  for (const auto& a : actions) total += a.busy_ns;
  return total;
}

Json RunRecord::to_json() const {
  Json actions_json = Json::array();
  for (const auto& a : actions) {
    actions_json.push_back({{"state", a.state_name},
                            {"kind", to_string(a.kind)},
                            {"phase", a.phase},
                            {"action_state", to_string(a.action_state)},
                            {"attempts", a.attempts},
                            {"start_ns", a.start_ns},
                            {"end_ns", a.end_ns},
                            {"busy_ns", a.busy_ns},
                            {"output", a.output},
                            {"error", a.error}});
  }
  return Json{{"run_id", run_id},
              {"flow_id", flow_id},
              {"input", input},
              {"status", to_string(status)},
              {"created_ns", created_ns},
              {"finished_ns", finished_ns},
              {"end_to_end_ns", end_to_end_ns()},
              {"busy_ns", busy_ns()},
              {"orchestration_ns", orchestration_ns()},
              {"actions", actions_json}};
}

}  // namespace edgeflow::flow
