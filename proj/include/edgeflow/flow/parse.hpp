#pragma once

#include <string>

#include "edgeflow/flow/types.hpp"

namespace edgeflow::flow {

// Parse and validate a flow definition document:
//
//   {
//     "flow_id": "train-remote",
//     "start": "stage_data",
//     "states": {
//       "stage_data": {"kind": "transfer", "provider": "wan",
//                      "params": {"src": "$input.src_path", ...},
//                      "next": "train", "on_failure": "fail",
//                      "max_retries": 3, "retry_backoff": "1s",
//                      "phase": "data"},
//       "train":      {"kind": "compute", "provider": "faas-dc", ...},
//       ...
//       "done": {"kind": "succeed"},
//       "fail": {"kind": "fail"}
//     }
//   }
//
// Structural checks cover exactly the states reachable from start: targets
// must exist, the reachable graph must be acyclic, terminal states carry
// no outgoing edges, parameter templates must be well formed.
FlowDefinition parse_flow(const std::string& text, const std::string& origin = "<flow>");
FlowDefinition parse_flow_json(const Json& doc, const std::string& origin = "<flow>");
FlowDefinition parse_flow_file(const std::string& path);

// Substitute $input.<key> references in a params template. Whole-string
// references take the input value with its JSON type; embedded references
// are replaced textually. Unknown keys throw ParameterError.
Json render_params(const Json& params, const Json& input);

}  // namespace edgeflow::flow
