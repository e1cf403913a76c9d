#pragma once

#include <memory>

#include "edgeflow/faas/endpoint.hpp"
#include "edgeflow/faas/remote.hpp"
#include "edgeflow/flow/provider.hpp"

namespace edgeflow::faas {

// Compute action provider over an endpoint. Action params:
//   {"function_id": "...", "args": {...}}
// The dispatch handle is the task id; the endpoint's idempotent invoke
// gives the engine its at-least-once safety.
class ComputeProvider final : public flow::ActionProvider {
public:
  explicit ComputeProvider(Endpoint& endpoint) : endpoint_(&endpoint) {}
  explicit ComputeProvider(std::shared_ptr<EndpointClient> client)
      : client_(std::move(client)) {}

  std::string dispatch(const flow::Invocation& inv) override;
  flow::PollResult poll(const std::string& handle) override;
  std::optional<std::int64_t> next_event_ns() override;

private:
  Endpoint* endpoint_ = nullptr;  // in-process
  std::shared_ptr<EndpointClient> client_;  // remote
};

}  // namespace edgeflow::faas
