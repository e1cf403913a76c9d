#pragma once

#include <string>

#include "edgeflow/cost/types.hpp"
#include "edgeflow/util/kvconfig.hpp"

namespace edgeflow::cost {

// Loads a PlanQuery from key/value configuration text:
//
//   link.rate_bytes_per_s = 1e9
//   link.startup = 0s
//   link.rtt = 48ms               # optional, default 0s
//   link.per_file = 0s            # optional, default 0s
//   dataset.datum_bytes = 240
//   dataset.result_bytes = 8
//   dataset.model_bytes = 3000000
//   dataset.count = 1000000       # overridable by the caller
//   dataset.file_count = 1
//   plan.training_fraction = 0.1
//   plan.experiment_site = ex     # optional, default ex
//   plan.datacenter_site = dc     # optional, default dc
//   cost.analyze.dc = 2.44us      # cost.<operation>.<site> = per-datum time
//   cost.estimate.ex = 0.35us
//   cost.train.dc.fixed = 19s     # per-invocation; train only
//
// Unknown keys are an error so typos fail fast.
PlanQuery load_plan_query(const util::KvConfig& cfg);
PlanQuery load_plan_query_file(const std::string& path);

LinkModel load_link_model(const util::KvConfig& cfg);
OperationCostTable load_cost_table(const util::KvConfig& cfg);

}  // namespace edgeflow::cost
