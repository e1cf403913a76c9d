#include "edgeflow/cost/planconfig.hpp"

#include <set>
#include <sstream>
#include <vector>

namespace edgeflow::cost {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

const std::set<std::string> kKnownKeys = {
    "link.rate_bytes_per_s", "link.startup",       "link.rtt",
    "link.per_file",         "dataset.datum_bytes", "dataset.result_bytes",
    "dataset.model_bytes",   "dataset.count",       "dataset.file_count",
    "plan.training_fraction", "plan.experiment_site", "plan.datacenter_site",
};

}  // namespace

LinkModel load_link_model(const util::KvConfig& cfg) {
  LinkModel link;
  link.rate_bytes_per_s = cfg.require_number("link.rate_bytes_per_s");
  link.startup_ns = cfg.duration_ns_or("link.startup", 0);
  link.rtt_ns = cfg.duration_ns_or("link.rtt", 0);
  link.per_file_ns = cfg.duration_ns_or("link.per_file", 0);
  try {
    link.validate();
  } catch (const ParameterError& e) {
    throw cfg.error_at("link.rate_bytes_per_s", e.what());
  }
  return link;
}

OperationCostTable load_cost_table(const util::KvConfig& cfg) {
  OperationCostTable table;
  for (const std::string& key : cfg.keys_with_prefix("cost.")) {
    auto parts = split(key, '.');
    bool fixed = parts.size() == 4 && parts[3] == "fixed";
    if (parts.size() != 3 && !fixed)
      throw cfg.error_at(key, "expected cost.<operation>.<site> or cost.train.<site>.fixed");
    OperationKind kind;
    try {
      kind = operation_kind_from_string(parts[1]);
    } catch (const ParseError& e) {
      throw cfg.error_at(key, e.what());
    }
    const SiteId& site = parts[2];
    CostEntry entry;
    if (table.has(kind, site)) entry = table.lookup(kind, site);
    std::int64_t ns = cfg.require_duration_ns(key);
    if (fixed) {
      if (kind != OperationKind::Train)
        throw cfg.error_at(key, "fixed cost only applies to train");
      entry.fixed_ns = ns;
    } else {
      entry.unit_ns = ns;
    }
    try {
      table.set(kind, site, entry);
    } catch (const ParameterError& e) {
      throw cfg.error_at(key, e.what());
    }
  }
  return table;
}

PlanQuery load_plan_query(const util::KvConfig& cfg) {
  for (const std::string& key : cfg.keys_with_prefix("")) {
    if (key.rfind("cost.", 0) == 0) continue;
    if (!kKnownKeys.count(key)) throw cfg.error_at(key, "unknown key '" + key + "'");
  }

  PlanQuery q;
  q.link = load_link_model(cfg);
  q.costs = load_cost_table(cfg);
  q.dataset.datum_bytes = cfg.require_int("dataset.datum_bytes");
  q.dataset.result_bytes = cfg.require_int("dataset.result_bytes");
  q.dataset.model_bytes = cfg.require_int("dataset.model_bytes");
  q.dataset.count_n = cfg.int_or("dataset.count", 0);
  q.dataset.file_count = cfg.int_or("dataset.file_count", 1);
  q.training_fraction = cfg.require_number("plan.training_fraction");
  q.experiment_site = cfg.get_or("plan.experiment_site", "ex");
  q.datacenter_site = cfg.get_or("plan.datacenter_site", "dc");
  try {
    q.validate();
  } catch (const ParameterError& e) {
    throw ParseError(cfg.origin(), e.what());
  }
  return q;
}

PlanQuery load_plan_query_file(const std::string& path) {
  return load_plan_query(util::KvConfig::parse_file(path));
}

}  // namespace edgeflow::cost
