#include "edgeflow/flow/runlog.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>

namespace edgeflow::flow {

namespace fs = std::filesystem;

RunLogWriter::RunLogWriter(std::string dir) : dir_(std::move(dir)) {
  if (dir_.empty()) throw ParameterError("run log directory must not be empty");
  fs::create_directories(dir_);
}

void RunLogWriter::append(const std::string& run_id, const Json& record) {
  fs::path path = fs::path(dir_) / (run_id + ".jsonl");
  std::ofstream out(path, std::ios::app);
  if (!out) throw NetError("cannot append to run log " + path.string());
  out << record.dump() << "\n";
  out.flush();
  if (observer_) observer_(run_id, record);
}

void RunLogWriter::append_start_key(const std::string& key, const std::string& run_id) {
  fs::path path = fs::path(dir_) / "starts.jsonl";
  std::ofstream out(path, std::ios::app);
  if (!out) throw NetError("cannot append to start index " + path.string());
  out << Json{{"key", key}, {"run_id", run_id}}.dump() << "\n";
  out.flush();
}

namespace {

ActionLogEntry* find_entry(RunRecord& rec, const std::string& state) {
  for (auto it = rec.actions.rbegin(); it != rec.actions.rend(); ++it)
    if (it->state_name == state) return &*it;
  return nullptr;
}

}  // namespace

ReplayedRun replay_run_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open run log " + path);

  ReplayedRun run;
  bool created = false;
  std::string line;
  int lineno = 0;
  // Per-state attempt/state tracking for transition checking.
  std::map<std::string, ActionState> states;
  std::map<std::string, int> attempts;
  std::map<std::string, int> max_retries;

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Json rec;
    try {
      rec = util::parse_json_strict(line, path + ":" + std::to_string(lineno));
    } catch (const ParseError& e) {
      throw StateError(std::string("corrupt run log record: ") + e.what());
    }
    const std::string kind = rec.value("kind", "");
    const auto ts = rec.value("ts_ns", static_cast<std::int64_t>(0));
    if (kind == "run_created") {
      if (created) throw StateError(path + ": duplicate run_created");
      created = true;
      run.record.run_id = rec.value("run_id", "");
      run.record.flow_id = rec.value("flow_id", "");
      run.record.input = rec.value("input", Json::object());
      run.record.created_ns = ts;
      run.flow_source = rec.value("flow", Json::object());
      // Attempt bounds come from the persisted flow document.
      if (run.flow_source.contains("states")) {
        for (auto it = run.flow_source["states"].begin();
             it != run.flow_source["states"].end(); ++it)
          max_retries[it.key()] = it.value().value("max_retries", 3);
      }
    } else if (kind == "action") {
      if (!created) throw StateError(path + ": action record before run_created");
      if (run.record.terminal())
        throw StateError(path + ": action record after run finalized");
      const std::string state = rec.value("state", "");
      ActionState from = action_state_from_string(rec.value("from", ""));
      ActionState to = action_state_from_string(rec.value("to", ""));
      ActionState current =
          states.count(state) ? states[state] : ActionState::Pending;
      if (from != current)
        throw StateError(path + ":" + std::to_string(lineno) + ": state '" + state +
                         "' transition from '" + to_string(from) + "' but log shows '" +
                         to_string(current) + "'");
      if (!legal_transition(from, to))
        throw StateError(path + ":" + std::to_string(lineno) + ": illegal transition " +
                         to_string(from) + " -> " + to_string(to) + " on state '" + state + "'");
      int attempt = rec.value("attempt", 1);
      if (to == ActionState::Dispatched) {
        int expected = attempts.count(state) ? attempts[state] + 1 : 1;
        if (attempt != expected)
          throw StateError(path + ":" + std::to_string(lineno) + ": state '" + state +
                           "' dispatched attempt " + std::to_string(attempt) + ", expected " +
                           std::to_string(expected));
        int bound = max_retries.count(state) ? max_retries[state] : 3;
        if (attempt > bound)
          throw StateError(path + ":" + std::to_string(lineno) + ": state '" + state +
                           "' exceeded max_retries " + std::to_string(bound));
        attempts[state] = attempt;
      }
      states[state] = to;
      run.current_state = state;
      run.current_action_state = to;
      run.current_attempt = attempts.count(state) ? attempts[state] : 0;
      run.current_idem_key = rec.value("idem_key", run.current_idem_key);

      // Fold into the public record.
      ActionLogEntry* entry = find_entry(run.record, state);
      if (!entry) {
        run.record.actions.push_back({});
        entry = &run.record.actions.back();
        entry->state_name = state;
        entry->kind = action_kind_from_string(rec.value("action_kind", "compute"));
        entry->phase = rec.value("phase", "");
      }
      entry->action_state = to;
      entry->attempts = run.current_attempt;
      if (to == ActionState::Running && entry->start_ns < 0)
        entry->start_ns = rec.value("start_ns", ts);
      if (is_terminal(to)) {
        entry->end_ns = rec.value("end_ns", ts);
        if (rec.contains("busy_ns")) entry->busy_ns += rec["busy_ns"].get<std::int64_t>();
        if (rec.contains("output")) entry->output = rec["output"];
        entry->error = rec.value("error", "");
      }
    } else if (kind == "run_finalized") {
      if (!created) throw StateError(path + ": run_finalized before run_created");
      if (run.record.terminal()) throw StateError(path + ": duplicate run_finalized");
      run.record.status = run_status_from_string(rec.value("status", ""));
      if (!run.record.terminal())
        throw StateError(path + ": run_finalized with non-terminal status");
      run.record.finished_ns = ts;
    } else {
      throw StateError(path + ":" + std::to_string(lineno) + ": unknown record kind '" + kind +
                       "'");
    }
  }
  if (!created) throw StateError(path + ": missing run_created");
  return run;
}

std::vector<std::string> list_run_logs(const std::string& dir) {
  std::vector<std::string> logs;
  if (!fs::exists(dir)) return logs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name == "starts.jsonl") continue;
    if (entry.path().extension() == ".jsonl") logs.push_back(entry.path().string());
  }
  std::sort(logs.begin(), logs.end());
  return logs;
}

std::map<std::string, std::string> load_start_keys(const std::string& dir) {
  std::map<std::string, std::string> keys;
  fs::path path = fs::path(dir) / "starts.jsonl";
  std::ifstream in(path);
  if (!in) return keys;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json rec = util::parse_json_strict(line, path.string());
    keys[rec.value("key", "")] = rec.value("run_id", "");
  }
  return keys;
}

std::size_t validate_run_logs(const std::string& dir) {
  auto logs = list_run_logs(dir);
  for (const auto& path : logs) replay_run_log(path);
  return logs.size();
}

}  // namespace edgeflow::flow
