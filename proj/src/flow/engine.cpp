#include "edgeflow/flow/engine.hpp"

#include <algorithm>

#include "edgeflow/flow/parse.hpp"

namespace edgeflow::flow {

namespace {

std::string attempt_key(const std::string& run_id, const std::string& state, int attempt) {
  return run_id + "/" + state + "/" + std::to_string(attempt);
}

std::int64_t backoff_ns(const ActionSpec& spec, int failed_attempts) {
  std::int64_t delay = spec.retry_backoff_ns;
  for (int i = 1; i < failed_attempts; ++i) delay *= 2;
  return delay;
}

bool compare(ChoiceOp op, double lhs, double rhs) {
  switch (op) {
    case ChoiceOp::Lt: return lhs < rhs;
    case ChoiceOp::Le: return lhs <= rhs;
    case ChoiceOp::Eq: return lhs == rhs;
    case ChoiceOp::Ge: return lhs >= rhs;
    case ChoiceOp::Gt: return lhs > rhs;
  }
  return false;
}

}  // namespace

Engine::Engine(util::Clock& clock, ProviderMap providers, EngineOptions options,
               std::shared_ptr<util::IdGen> ids)
    : clock_(clock),
      providers_(std::move(providers)),
      options_(options),
      ids_(ids ? std::move(ids) : std::make_shared<util::IdGen>()),
      log_(options.log_dir) {
  if (options_.recover) restore_from_logs();
}

void Engine::restore_from_logs() {
  start_keys_ = load_start_keys(log_.dir());
  for (const std::string& path : list_run_logs(log_.dir())) {
    ReplayedRun replayed = replay_run_log(path);
    auto run = std::make_shared<RunState>();
    run->flow = parse_flow_json(replayed.flow_source, path);
    run->record = replayed.record;
    run->current = replayed.current_state.empty() ? run->flow.start : replayed.current_state;
    run->action_state = replayed.current_action_state;
    run->attempt = replayed.current_attempt;
    run->idem_key = replayed.current_idem_key;
    run->have_handle = false;
    if (!run->record.terminal()) {
      // If the last persisted transition finished an action, the successor
      // is the real current state.
      if (run->action_state == ActionState::Succeeded) {
        const ActionSpec& spec = run->flow.at(run->current);
        std::string next = spec.choice ? std::string() : spec.next;
        if (spec.choice) {
          // Re-derive the branch from the logged output.
          const ActionLogEntry* entry = nullptr;
          for (const auto& a : run->record.actions)
            if (a.state_name == run->current) entry = &a;
          if (entry && entry->output.contains("taken"))
            next = entry->output["taken"].get<std::string>();
        }
        if (!next.empty()) {
          run->current = next;
          run->action_state = ActionState::Pending;
          run->attempt = 0;
          run->idem_key.clear();
        }
      }
    }
    std::lock_guard<std::mutex> g(mu_);
    runs_[run->record.run_id] = run;
  }
}

ActionProvider* Engine::provider_for(const std::string& id) const {
  auto it = providers_.find(id);
  return it == providers_.end() ? nullptr : it->second.get();
}

std::string Engine::start_run(const FlowDefinition& flow, const Json& input,
                              const std::string& idempotency_key) {
  if (!input.is_object()) throw ParameterError("run input must be a JSON object");
  for (const std::string& key : flow.required_input_keys())
    if (!input.contains(key))
      throw ParameterError("input is missing key '" + key + "' required by flow '" +
                           flow.flow_id + "'");

  std::lock_guard<std::mutex> g(mu_);
  if (!idempotency_key.empty()) {
    auto it = start_keys_.find(idempotency_key);
    if (it != start_keys_.end()) return it->second;
  }

  auto run = std::make_shared<RunState>();
  run->flow = flow;
  run->record.run_id = ids_->next("r");
  run->record.flow_id = flow.flow_id;
  run->record.input = input;
  run->record.created_ns = clock_.now_ns();
  run->current = flow.start;

  Json created = {{"kind", "run_created"},
                  {"ts_ns", run->record.created_ns},
                  {"run_id", run->record.run_id},
                  {"flow_id", flow.flow_id},
                  {"flow", flow.source},
                  {"input", input}};
  if (!idempotency_key.empty()) created["idempotency_key"] = idempotency_key;
  log_.append(run->record.run_id, created);
  if (!idempotency_key.empty()) {
    log_.append_start_key(idempotency_key, run->record.run_id);
    start_keys_[idempotency_key] = run->record.run_id;
  }
  runs_[run->record.run_id] = run;
  return run->record.run_id;
}

ActionLogEntry& Engine::entry_for(RunState& run, const ActionSpec& spec) {
  for (auto it = run.record.actions.rbegin(); it != run.record.actions.rend(); ++it)
    if (it->state_name == spec.name) return *it;
  run.record.actions.push_back({});
  ActionLogEntry& entry = run.record.actions.back();
  entry.state_name = spec.name;
  entry.kind = spec.kind;
  entry.phase = spec.phase;
  return entry;
}

void Engine::persist_action(RunState& run, const ActionSpec& spec, ActionState from,
                            ActionState to, const Json& extra) {
  std::int64_t now = clock_.now_ns();
  Json rec = {{"kind", "action"},        {"ts_ns", now},
              {"state", spec.name},      {"action_kind", to_string(spec.kind)},
              {"phase", spec.phase},     {"from", to_string(from)},
              {"to", to_string(to)},     {"attempt", run.attempt},
              {"idem_key", run.idem_key}};
  for (auto it = extra.begin(); it != extra.end(); ++it) rec[it.key()] = it.value();
  log_.append(run.record.run_id, rec);

  ActionLogEntry& entry = entry_for(run, spec);
  entry.action_state = to;
  entry.attempts = run.attempt;
  if (to == ActionState::Running && entry.start_ns < 0)
    entry.start_ns = extra.value("start_ns", now);
  if (is_terminal(to)) {
    entry.end_ns = extra.value("end_ns", now);
    entry.busy_ns += extra.value("busy_ns", static_cast<std::int64_t>(0));
    if (extra.contains("output")) entry.output = extra["output"];
    entry.error = extra.value("error", "");
  }
  run.action_state = to;
}

void Engine::finalize(RunState& run, RunStatus status) {
  std::int64_t now = clock_.now_ns();
  log_.append(run.record.run_id,
              {{"kind", "run_finalized"}, {"ts_ns", now}, {"status", to_string(status)}});
  run.record.status = status;
  run.record.finished_ns = now;
}

void Engine::enter_state(RunState& run, const std::string& name) {
  run.current = name;
  run.action_state = ActionState::Pending;
  run.attempt = 0;
  run.idem_key.clear();
  run.handle.clear();
  run.have_handle = false;
  run.not_before_ns = 0;
  run.attempt_started_ns = -1;
}

void Engine::complete_attempt(RunState& run, const ActionSpec& spec, const PollResult& result) {
  std::int64_t now = clock_.now_ns();
  std::int64_t start = result.start_ns >= 0 ? result.start_ns : run.attempt_started_ns;
  if (start < 0) start = now;
  std::int64_t end = result.end_ns >= 0 ? result.end_ns : now;
  if (run.action_state == ActionState::Dispatched)
    persist_action(run, spec, ActionState::Dispatched, ActionState::Running,
                   {{"start_ns", start}});
  persist_action(run, spec, ActionState::Running, ActionState::Succeeded,
                 {{"end_ns", end}, {"busy_ns", end - start}, {"output", result.output}});
  enter_state(run, spec.next);
}

void Engine::fail_attempt(RunState& run, const ActionSpec& spec, const std::string& error,
                          std::int64_t start_ns, std::int64_t end_ns) {
  if (run.action_state == ActionState::Dispatched)
    persist_action(run, spec, ActionState::Dispatched, ActionState::Running,
                   {{"start_ns", start_ns}});
  persist_action(run, spec, ActionState::Running, ActionState::Failed,
                 {{"end_ns", end_ns}, {"busy_ns", end_ns - start_ns}, {"error", error}});
  run.handle.clear();
  run.have_handle = false;
  if (run.attempt < spec.max_retries) {
    run.not_before_ns = clock_.now_ns() + backoff_ns(spec, run.attempt);
    return;  // stays Failed; a later advance re-dispatches
  }
  if (!spec.on_failure.empty()) {
    enter_state(run, spec.on_failure);
    return;
  }
  finalize(run, RunStatus::Failed);
}

void Engine::do_cancel(RunState& run) {
  if (run.record.terminal()) return;
  const ActionSpec& spec = run.flow.at(run.current);
  switch (run.action_state) {
    case ActionState::Pending:
      run.attempt = std::max(run.attempt, 0);
      persist_action(run, spec, ActionState::Pending, ActionState::Cancelled,
                     {{"error", "cancelled"}});
      break;
    case ActionState::Dispatched:
    case ActionState::Running: {
      ActionProvider* p = provider_for(spec.provider);
      if (p && run.have_handle) p->cancel(run.handle);
      persist_action(run, spec, run.action_state, ActionState::Cancelled,
                     {{"error", "cancelled"}});
      break;
    }
    case ActionState::Failed:
      break;  // between attempts; nothing in flight
    case ActionState::Succeeded:
    case ActionState::Cancelled:
      break;
  }
  finalize(run, RunStatus::Cancelled);
}

bool Engine::advance(const std::string& run_id) {
  std::shared_ptr<RunState> run;
  {
    std::lock_guard<std::mutex> g(mu_);
    auto it = runs_.find(run_id);
    if (it == runs_.end()) throw NotFoundError("unknown run '" + run_id + "'");
    run = it->second;
  }
  std::lock_guard<std::mutex> g(run->mu);
  return advance_locked(run_id, *run);
}

bool Engine::advance_locked(const std::string&, RunState& run) {
  if (run.record.terminal()) return false;
  if (run.cancel_requested) {
    do_cancel(run);
    return true;
  }
  std::int64_t now = clock_.now_ns();
  const ActionSpec& spec = run.flow.at(run.current);

  if (spec.kind == ActionKind::Succeed) {
    finalize(run, RunStatus::Succeeded);
    return true;
  }
  if (spec.kind == ActionKind::Fail) {
    finalize(run, RunStatus::Failed);
    return true;
  }

  auto begin_attempt = [&](ActionState from) {
    run.attempt += 1;
    run.idem_key = attempt_key(run.record.run_id, spec.name, run.attempt);
    persist_action(run, spec, from, ActionState::Dispatched, Json::object());
    run.attempt_started_ns = now;
  };

  if (spec.kind == ActionKind::Choice) {
    if (run.action_state != ActionState::Pending) return false;
    begin_attempt(ActionState::Pending);
    persist_action(run, spec, ActionState::Dispatched, ActionState::Running,
                   {{"start_ns", now}});
    const ChoiceSpec& c = *spec.choice;
    const ActionLogEntry* source = nullptr;
    for (const auto& a : run.record.actions)
      if (a.state_name == c.source_state && a.action_state == ActionState::Succeeded)
        source = &a;
    if (!source || !source->output.contains(c.field) ||
        !source->output[c.field].is_number()) {
      fail_attempt(run, spec,
                   "choice needs numeric field '" + c.field + "' from state '" +
                       c.source_state + "'",
                   now, now);
      return true;
    }
    double value = source->output[c.field].get<double>();
    bool taken = compare(c.op, value, c.literal);
    const std::string& target = taken ? c.if_true : c.if_false;
    persist_action(run, spec, ActionState::Running, ActionState::Succeeded,
                   {{"end_ns", now},
                    {"busy_ns", 0},
                    {"output", Json{{"value", value}, {"result", taken}, {"taken", target}}}});
    enter_state(run, target);
    return true;
  }

  // Transfer / Compute actions.
  ActionProvider* provider = provider_for(spec.provider);
  auto dispatch_now = [&]() {
    if (!provider) {
      fail_attempt(run, spec, "unknown provider '" + spec.provider + "'", now, now);
      return;
    }
    Invocation inv;
    inv.idempotency_key = run.idem_key;
    inv.run_id = run.record.run_id;
    inv.state = spec.name;
    inv.attempt = run.attempt;
    inv.kind = spec.kind;
    inv.provider_id = spec.provider;
    try {
      inv.params = render_params(spec.params, run.record.input);
      run.handle = provider->dispatch(inv);
      run.have_handle = true;
    } catch (const std::exception& e) {
      fail_attempt(run, spec, e.what(), now, now);
    }
  };

  switch (run.action_state) {
    case ActionState::Pending:
      begin_attempt(ActionState::Pending);
      dispatch_now();
      return true;

    case ActionState::Failed:
      if (now < run.not_before_ns) return false;
      begin_attempt(ActionState::Failed);
      dispatch_now();
      return true;

    case ActionState::Dispatched:
    case ActionState::Running: {
      if (!run.have_handle) {
        // Crash recovery: re-dispatch under the same attempt key; the
        // provider deduplicates.
        dispatch_now();
        if (!run.have_handle) return true;  // dispatch failed and was logged
      }
      PollResult result;
      try {
        result = provider->poll(run.handle);
      } catch (const std::exception& e) {
        fail_attempt(run, spec, e.what(), run.attempt_started_ns, now);
        return true;
      }
      switch (result.phase) {
        case PollResult::Phase::Dispatched:
          return false;
        case PollResult::Phase::Running:
          if (run.action_state == ActionState::Dispatched) {
            persist_action(run, spec, ActionState::Dispatched, ActionState::Running,
                           {{"start_ns", result.start_ns >= 0 ? result.start_ns : now}});
            return true;
          }
          return false;
        case PollResult::Phase::Succeeded:
          complete_attempt(run, spec, result);
          return true;
        case PollResult::Phase::Failed: {
          std::int64_t start = result.start_ns >= 0 ? result.start_ns : run.attempt_started_ns;
          if (start < 0) start = now;
          std::int64_t end = result.end_ns >= 0 ? result.end_ns : now;
          fail_attempt(run, spec, result.error, start, end);
          return true;
        }
      }
      return false;
    }

    case ActionState::Succeeded:
    case ActionState::Cancelled:
      return false;
  }
  return false;
}

RunRecord Engine::run_to_completion(const std::string& run_id) {
  while (true) {
    bool progressed = advance(run_id);
    RunRecord rec = get_status(run_id);
    if (rec.terminal()) return rec;
    if (progressed) continue;

    if (clock_.is_virtual()) {
      auto* vc = dynamic_cast<util::VirtualClock*>(&clock_);
      std::optional<std::int64_t> wake = next_provider_event_ns();
      std::optional<std::int64_t> timer = next_timer_ns();
      if (timer && (!wake || *timer < *wake)) wake = timer;
      if (!wake)
        throw StateError("deadlock: run '" + run_id +
                         "' is active but no provider event or retry timer is pending");
      vc->advance_to(std::max(*wake, vc->now_ns()));
    } else {
      clock_.sleep_for_ns(options_.poll_interval_ns);
    }
  }
}

RunRecord Engine::get_status(const std::string& run_id) const {
  std::shared_ptr<RunState> run;
  {
    std::lock_guard<std::mutex> g(mu_);
    auto it = runs_.find(run_id);
    if (it == runs_.end()) throw NotFoundError("unknown run '" + run_id + "'");
    run = it->second;
  }
  std::lock_guard<std::mutex> g(run->mu);
  return run->record;
}

CancelAck Engine::cancel(const std::string& run_id) {
  std::shared_ptr<RunState> run;
  {
    std::lock_guard<std::mutex> g(mu_);
    auto it = runs_.find(run_id);
    if (it == runs_.end()) throw NotFoundError("unknown run '" + run_id + "'");
    run = it->second;
  }
  std::lock_guard<std::mutex> g(run->mu);
  if (run->record.terminal())
    return CancelAck{true, run->record.status};
  run->cancel_requested = true;
  do_cancel(*run);
  return CancelAck{false, run->record.status};
}

std::vector<std::string> Engine::active_runs() const {
  std::vector<std::string> ids;
  std::lock_guard<std::mutex> g(mu_);
  for (const auto& [id, run] : runs_) {
    std::lock_guard<std::mutex> rg(run->mu);
    if (!run->record.terminal()) ids.push_back(id);
  }
  return ids;
}

bool Engine::advance_all() {
  bool progressed = false;
  for (const std::string& id : active_runs()) progressed |= advance(id);
  return progressed;
}

std::optional<std::int64_t> Engine::next_timer_ns() const {
  std::optional<std::int64_t> best;
  std::lock_guard<std::mutex> g(mu_);
  for (const auto& [id, run] : runs_) {
    std::lock_guard<std::mutex> rg(run->mu);
    if (run->record.terminal()) continue;
    if (run->action_state == ActionState::Failed && run->not_before_ns > 0)
      if (!best || run->not_before_ns < *best) best = run->not_before_ns;
  }
  return best;
}

std::optional<std::int64_t> Engine::next_provider_event_ns() const {
  std::optional<std::int64_t> best;
  for (const auto& [id, p] : providers_) {
    auto t = p->next_event_ns();
    if (t && (!best || *t < *best)) best = t;
  }
  return best;
}

}  // namespace edgeflow::flow
