#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "edgeflow/util/errors.hpp"
#include "edgeflow/util/jsonio.hpp"

namespace edgeflow::faas {

using util::Json;

// A function body is either an external command template or a simulated
// duration. Code never loads in-process; real work happens in a
// subprocess, which keeps the endpoint language-agnostic.
struct FunctionBody {
  std::string command;  // template with {placeholder} substitutions
  std::string workdir;
  std::vector<std::string> outputs;  // artifact paths that must exist on success
  std::optional<std::int64_t> simulated_duration_ns;

  bool simulated() const { return simulated_duration_ns.has_value(); }
  void validate() const;
  Json to_json() const;
  static FunctionBody from_json(const Json& j);
};

struct FunctionRegistration {
  std::string function_id;
  FunctionBody body;
};

enum class TaskState { Queued, Running, Done, Error };

const char* to_string(TaskState s);

struct TaskRecord {
  std::string task_id;
  std::string function_id;
  Json arguments;
  TaskState state = TaskState::Queued;
  int exit_code = 0;
  Json output;        // captured output document (small; artifacts move separately)
  std::string error;
  std::int64_t submitted_ns = -1;
  std::int64_t start_ns = -1;
  std::int64_t end_ns = -1;

  std::int64_t duration_ns() const {
    return (start_ns >= 0 && end_ns >= 0) ? end_ns - start_ns : -1;
  }
  Json to_json() const;
};

struct EndpointInfo {
  std::string endpoint_id;
  std::string site;
  int capacity = 1;  // max concurrent tasks
  std::string mode = "real";  // "real" | "simulated"

  void validate() const;
};

struct CapacityReport {
  EndpointInfo info;
  int running = 0;
  int queued = 0;
};

struct TaskTransition {
  std::int64_t ts_ns;
  std::string task_id;
  TaskState from;
  TaskState to;
};

}  // namespace edgeflow::faas
