#include "edgeflow/faas/provider.hpp"

namespace edgeflow::faas {

std::string ComputeProvider::dispatch(const flow::Invocation& inv) {
  if (!inv.params.contains("function_id") || !inv.params["function_id"].is_string())
    throw ParameterError("compute action needs a string 'function_id' param");
  const std::string function_id = inv.params["function_id"];
  const Json args = inv.params.value("args", Json::object());
  if (endpoint_) return endpoint_->invoke(function_id, args, inv.idempotency_key);
  return client_->invoke(function_id, args, inv.idempotency_key);
}

flow::PollResult ComputeProvider::poll(const std::string& handle) {
  TaskRecord rec = endpoint_ ? endpoint_->poll(handle) : client_->poll(handle);
  flow::PollResult result;
  result.start_ns = rec.start_ns;
  result.end_ns = rec.end_ns;
  switch (rec.state) {
    case TaskState::Queued:
      result.phase = flow::PollResult::Phase::Dispatched;
      break;
    case TaskState::Running:
      result.phase = flow::PollResult::Phase::Running;
      break;
    case TaskState::Done:
      result.phase = flow::PollResult::Phase::Succeeded;
      result.output = rec.output;
      result.output["task_id"] = rec.task_id;
      break;
    case TaskState::Error:
      result.phase = flow::PollResult::Phase::Failed;
      result.error = rec.error.empty() ? "task failed" : rec.error;
      break;
  }
  return result;
}

std::optional<std::int64_t> ComputeProvider::next_event_ns() {
  if (endpoint_) return endpoint_->next_transition_ns();
  return std::nullopt;
}

}  // namespace edgeflow::faas
