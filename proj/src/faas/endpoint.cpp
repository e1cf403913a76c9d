#include "edgeflow/faas/endpoint.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace edgeflow::faas {

namespace fs = std::filesystem;

void FunctionBody::validate() const {
  if (simulated()) {
    if (*simulated_duration_ns < 0)
      throw ParameterError("simulated duration must be >= 0");
    if (!command.empty())
      throw ParameterError("function body is either a command or a simulated duration");
    return;
  }
  if (command.empty()) throw ParameterError("function body has an empty command");
  // Brace placeholders must be balanced and non-empty; "{{" escapes a
  // literal brace.
  size_t pos = 0;
  while ((pos = command.find('{', pos)) != std::string::npos) {
    if (pos + 1 < command.size() && command[pos + 1] == '{') {
      pos += 2;
      continue;
    }
    size_t close = command.find('}', pos);
    if (close == std::string::npos || close == pos + 1)
      throw ParameterError("malformed placeholder in command template: " + command);
    pos = close + 1;
  }
}

Json FunctionBody::to_json() const {
  Json j = Json::object();
  if (simulated()) {
    j["simulated_duration_ns"] = *simulated_duration_ns;
  } else {
    j["command"] = command;
    if (!workdir.empty()) j["workdir"] = workdir;
    if (!outputs.empty()) j["outputs"] = outputs;
  }
  return j;
}

FunctionBody FunctionBody::from_json(const Json& j) {
  FunctionBody body;
  if (j.contains("simulated_duration_ns"))
    body.simulated_duration_ns = j["simulated_duration_ns"].get<std::int64_t>();
  body.command = j.value("command", "");
  body.workdir = j.value("workdir", "");
  if (j.contains("outputs")) body.outputs = j["outputs"].get<std::vector<std::string>>();
  body.validate();
  return body;
}

const char* to_string(TaskState s) {
  switch (s) {
    case TaskState::Queued: return "queued";
    case TaskState::Running: return "running";
    case TaskState::Done: return "done";
    case TaskState::Error: return "error";
  }
  return "?";
}

Json TaskRecord::to_json() const {
  return Json{{"task_id", task_id},     {"function_id", function_id},
              {"arguments", arguments}, {"state", to_string(state)},
              {"exit_code", exit_code}, {"output", output},
              {"error", error},         {"submitted_ns", submitted_ns},
              {"start_ns", start_ns},   {"end_ns", end_ns},
              {"duration_ns", duration_ns()}};
}

void EndpointInfo::validate() const {
  if (endpoint_id.empty()) throw ParameterError("endpoint id must not be empty");
  if (capacity < 1) throw ParameterError("endpoint capacity must be >= 1");
  if (mode != "real" && mode != "simulated")
    throw ParameterError("endpoint mode must be 'real' or 'simulated'");
}

Endpoint::Endpoint(EndpointInfo info, util::Clock& clock, std::string state_dir,
                   std::shared_ptr<util::IdGen> ids)
    : info_(std::move(info)),
      clock_(clock),
      state_dir_(std::move(state_dir)),
      ids_(ids ? std::move(ids) : std::make_shared<util::IdGen>()) {
  info_.validate();
  if (!state_dir_.empty()) {
    fs::create_directories(state_dir_);
    load_registry();
  }
  if (info_.mode == "real") {
    for (int i = 0; i < info_.capacity; ++i)
      workers_.emplace_back([this] { worker_loop(); });
  }
}

Endpoint::~Endpoint() { shutdown(); }

void Endpoint::shutdown() {
  {
    std::lock_guard<std::mutex> g(mu_);
    if (stopping_) return;
    stopping_ = true;
  }
  cv_.notify_all();
  for (auto& w : workers_) w.join();
  workers_.clear();
}

void Endpoint::load_registry() {
  std::ifstream in(fs::path(state_dir_) / "functions.jsonl");
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json j = util::parse_json_strict(line, "functions.jsonl");
    FunctionRegistration reg;
    reg.function_id = j.value("function_id", "");
    reg.body = FunctionBody::from_json(j["body"]);
    functions_[reg.function_id] = reg;
  }
}

void Endpoint::persist_function(const FunctionRegistration& reg) {
  if (state_dir_.empty()) return;
  std::ofstream out(fs::path(state_dir_) / "functions.jsonl", std::ios::app);
  out << Json{{"function_id", reg.function_id}, {"body", reg.body.to_json()}}.dump() << "\n";
}

std::string Endpoint::register_function(const FunctionBody& body) {
  body.validate();
  std::lock_guard<std::mutex> g(mu_);
  FunctionRegistration reg;
  reg.function_id = ids_->next("f");
  reg.body = body;
  functions_[reg.function_id] = reg;
  persist_function(reg);
  return reg.function_id;
}

FunctionRegistration Endpoint::function(const std::string& function_id) const {
  std::lock_guard<std::mutex> g(mu_);
  auto it = functions_.find(function_id);
  if (it == functions_.end()) throw NotFoundError("unknown function '" + function_id + "'");
  return it->second;
}

std::string Endpoint::render_command(const std::string& tmpl, const Json& args) {
  std::string out;
  size_t pos = 0;
  while (true) {
    size_t open = tmpl.find('{', pos);
    if (open == std::string::npos) {
      out += tmpl.substr(pos);
      break;
    }
    out += tmpl.substr(pos, open - pos);
    if (open + 1 < tmpl.size() && tmpl[open + 1] == '{') {
      out += '{';
      pos = open + 2;
      continue;
    }
    size_t close = tmpl.find('}', open);
    std::string key = tmpl.substr(open + 1, close - open - 1);
    if (!args.contains(key))
      throw ParameterError("arguments missing placeholder '" + key + "'");
    const Json& v = args[key];
    out += v.is_string() ? v.get<std::string>() : v.dump();
    pos = close + 1;
  }
  // Unescape literal closing braces.
  std::string final_out;
  for (size_t i = 0; i < out.size(); ++i) {
    if (out[i] == '}' && i + 1 < out.size() && out[i + 1] == '}') {
      final_out += '}';
      ++i;
    } else {
      final_out += out[i];
    }
  }
  return final_out;
}

std::string Endpoint::invoke(const std::string& function_id, const Json& args,
                             const std::string& idempotency_key) {
  std::unique_lock<std::mutex> lock(mu_);
  if (!idempotency_key.empty()) {
    auto it = idempotency_.find(idempotency_key);
    if (it != idempotency_.end()) return it->second;
  }
  auto fit = functions_.find(function_id);
  if (fit == functions_.end()) throw NotFoundError("unknown function '" + function_id + "'");
  if (down_) throw NetError("endpoint '" + info_.endpoint_id + "' is unreachable");
  const FunctionBody& body = fit->second.body;
  if (!body.simulated()) render_command(body.command, args);  // placeholder check up front
  for (const std::string& o : body.outputs) render_command(o, args);

  Task task;
  task.record.task_id = ids_->next("t");
  task.record.function_id = function_id;
  task.record.arguments = args;
  task.record.submitted_ns = clock_.now_ns();
  task.body = body;
  task.seq = next_seq_++;
  std::string task_id = task.record.task_id;
  tasks_[task_id] = std::move(task);
  queue_.push_back(task_id);
  if (!idempotency_key.empty()) idempotency_[idempotency_key] = task_id;

  if (info_.mode == "simulated") {
    admit_locked(clock_.now_ns());
  } else {
    cv_.notify_one();
  }
  return task_id;
}

void Endpoint::transition(Task& task, TaskState to, std::int64_t ts_ns) {
  log_.push_back({ts_ns, task.record.task_id, task.record.state, to});
  task.record.state = to;
}

// Admit queued tasks into free slots; slots free at completion instants.
void Endpoint::admit_locked(std::int64_t now_ns) {
  complete_due_locked(now_ns);
  while (!queue_.empty() && static_cast<int>(running_.size()) < info_.capacity) {
    std::string id = queue_.front();
    queue_.pop_front();
    Task& task = tasks_.at(id);
    std::int64_t start = std::max(task.record.submitted_ns, now_ns);
    task.record.start_ns = start;
    task.record.end_ns = start + *task.body.simulated_duration_ns;
    transition(task, TaskState::Running, start);
    running_.push_back(id);
  }
}

void Endpoint::complete_due_locked(std::int64_t now_ns) {
  while (true) {
    // Earliest-ending running task, ties by submission sequence.
    auto best = running_.end();
    for (auto it = running_.begin(); it != running_.end(); ++it) {
      const Task& t = tasks_.at(*it);
      if (t.record.end_ns > now_ns) continue;
      if (best == running_.end()) {
        best = it;
        continue;
      }
      const Task& b = tasks_.at(*best);
      if (t.record.end_ns < b.record.end_ns ||
          (t.record.end_ns == b.record.end_ns && t.seq < b.seq))
        best = it;
    }
    if (best == running_.end()) return;
    Task& task = tasks_.at(*best);
    std::int64_t freed_at = task.record.end_ns;
    task.record.output = {{"duration_ns", task.record.end_ns - task.record.start_ns}};
    transition(task, TaskState::Done, freed_at);
    running_.erase(best);
    // The freed slot admits the queue head at the completion instant.
    if (!queue_.empty()) {
      std::string id = queue_.front();
      queue_.pop_front();
      Task& nxt = tasks_.at(id);
      std::int64_t start = std::max(nxt.record.submitted_ns, freed_at);
      nxt.record.start_ns = start;
      nxt.record.end_ns = start + *nxt.body.simulated_duration_ns;
      transition(nxt, TaskState::Running, start);
      running_.push_back(id);
    }
  }
}

void Endpoint::tick(std::int64_t now_ns) {
  if (info_.mode != "simulated") return;
  std::lock_guard<std::mutex> g(mu_);
  admit_locked(now_ns);
}

std::optional<std::int64_t> Endpoint::next_transition_ns() const {
  std::lock_guard<std::mutex> g(mu_);
  std::optional<std::int64_t> best;
  for (const std::string& id : running_) {
    const Task& t = tasks_.at(id);
    if (!best || t.record.end_ns < *best) best = t.record.end_ns;
  }
  return best;
}

TaskRecord Endpoint::poll(const std::string& task_id) {
  if (info_.mode == "simulated") tick(clock_.now_ns());
  std::lock_guard<std::mutex> g(mu_);
  auto it = tasks_.find(task_id);
  if (it == tasks_.end()) throw NotFoundError("unknown task '" + task_id + "'");
  return it->second.record;
}

CapacityReport Endpoint::capacity() const {
  std::lock_guard<std::mutex> g(mu_);
  CapacityReport r;
  r.info = info_;
  r.running = static_cast<int>(running_.size());
  r.queued = static_cast<int>(queue_.size());
  return r;
}

void Endpoint::purge_completed() {
  std::lock_guard<std::mutex> g(mu_);
  for (auto it = tasks_.begin(); it != tasks_.end();) {
    TaskState s = it->second.record.state;
    if (s == TaskState::Done || s == TaskState::Error) {
      for (auto kit = idempotency_.begin(); kit != idempotency_.end();) {
        if (kit->second == it->first)
          kit = idempotency_.erase(kit);
        else
          ++kit;
      }
      it = tasks_.erase(it);
    } else {
      ++it;
    }
  }
}

void Endpoint::fail_running(const std::string& reason, std::int64_t at_ns) {
  std::lock_guard<std::mutex> g(mu_);
  for (const std::string& id : running_) {
    Task& task = tasks_.at(id);
    task.record.end_ns = at_ns;
    task.record.error = reason;
    task.record.exit_code = -1;
    transition(task, TaskState::Error, at_ns);
  }
  running_.clear();
}

std::vector<TaskTransition> Endpoint::transition_log() const {
  std::lock_guard<std::mutex> g(mu_);
  return log_;
}

void Endpoint::worker_loop() {
  while (true) {
    std::string task_id;
    {
      std::unique_lock<std::mutex> lock(mu_);
      cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      task_id = queue_.front();
      queue_.pop_front();
      Task& task = tasks_.at(task_id);
      task.record.start_ns = clock_.now_ns();
      transition(task, TaskState::Running, task.record.start_ns);
      running_.push_back(task_id);
    }

    // Execute outside the lock.
    Task snapshot;
    {
      std::lock_guard<std::mutex> g(mu_);
      snapshot = tasks_.at(task_id);
    }
    run_subprocess(snapshot);

    {
      std::lock_guard<std::mutex> g(mu_);
      Task& task = tasks_.at(task_id);
      task.record.exit_code = snapshot.record.exit_code;
      task.record.output = snapshot.record.output;
      task.record.error = snapshot.record.error;
      task.record.end_ns = clock_.now_ns();
      running_.erase(std::find(running_.begin(), running_.end(), task_id));
      transition(task, snapshot.record.state, task.record.end_ns);
    }
  }
}

void Endpoint::run_subprocess(Task& task) {
  if (task.body.simulated()) {
    // Simulated bodies on a real endpoint just sleep.
    clock_.sleep_for_ns(*task.body.simulated_duration_ns);
    task.record.state = TaskState::Done;
    task.record.output = {{"duration_ns", *task.body.simulated_duration_ns}};
    return;
  }
  std::string cmd;
  try {
    cmd = render_command(task.body.command, task.record.arguments);
  } catch (const std::exception& e) {
    task.record.state = TaskState::Error;
    task.record.error = e.what();
    return;
  }
  if (!task.body.workdir.empty()) cmd = "cd '" + task.body.workdir + "' && " + cmd;

  FILE* pipe = ::popen((cmd + " 2>&1").c_str(), "r");
  if (!pipe) {
    task.record.state = TaskState::Error;
    task.record.error = "failed to launch: " + cmd;
    return;
  }
  std::string captured;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) {
    if (captured.size() < (64u << 10)) captured.append(buf, n);
  }
  int status = ::pclose(pipe);
  int exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;

  task.record.exit_code = exit_code;
  Json output = {{"exit_code", exit_code}};
  // Trim trailing newline noise; a pure-JSON stdout becomes the result doc.
  while (!captured.empty() && (captured.back() == '\n' || captured.back() == '\r'))
    captured.pop_back();
  output["stdout"] = captured.size() > 4096 ? captured.substr(captured.size() - 4096) : captured;
  if (!captured.empty() && captured.front() == '{') {
    try {
      output["result"] = util::parse_json_strict(captured, "<task stdout>");
    } catch (const ParseError&) {
    }
  }
  task.record.output = output;

  if (exit_code != 0) {
    task.record.state = TaskState::Error;
    task.record.error = "command exited with status " + std::to_string(exit_code);
    return;
  }
  for (const std::string& tmpl : task.body.outputs) {
    std::string path = render_command(tmpl, task.record.arguments);
    if (!fs::exists(path)) {
      task.record.state = TaskState::Error;
      task.record.error = "declared output artifact missing: " + path;
      return;
    }
  }
  task.record.state = TaskState::Done;
}

}  // namespace edgeflow::faas
