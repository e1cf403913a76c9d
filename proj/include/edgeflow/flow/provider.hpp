#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "edgeflow/flow/types.hpp"

namespace edgeflow::flow {

// One dispatch of an action attempt. The idempotency key identifies the
// attempt; providers must deduplicate on it, because the engine's delivery
// is at-least-once (a re-dispatch after a crash must not re-execute work).
struct Invocation {
  std::string idempotency_key;  // "<run_id>/<state>/<attempt>"
  std::string run_id;
  std::string state;
  int attempt = 1;
  ActionKind kind = ActionKind::Compute;
  std::string provider_id;
  Json params;  // rendered (input references resolved)
};

struct PollResult {
  enum class Phase { Dispatched, Running, Succeeded, Failed };
  Phase phase = Phase::Dispatched;
  Json output;        // Succeeded
  std::string error;  // Failed
  // Provider-observed execution window; -1 when unknown. In virtual time
  // these are exact.
  std::int64_t start_ns = -1;
  std::int64_t end_ns = -1;
};

// A step service the engine can drive: dispatch returns a handle
// immediately, completion is observed by polling.
class ActionProvider {
public:
  virtual ~ActionProvider() = default;
  virtual std::string dispatch(const Invocation& inv) = 0;
  virtual PollResult poll(const std::string& handle) = 0;
  virtual void cancel(const std::string& /*handle*/) {}
  // Earliest virtual time at which any pending work may finish; lets a
  // virtual-clock driver advance time. nullopt when idle or real-time.
  virtual std::optional<std::int64_t> next_event_ns() { return std::nullopt; }
};

using ProviderMap = std::map<std::string, std::shared_ptr<ActionProvider>>;

}  // namespace edgeflow::flow
