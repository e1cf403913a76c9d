#include "edgeflow/cost/types.hpp"

namespace edgeflow::cost {

const char* to_string(OperationKind k) {
  switch (k) {
    case OperationKind::Collect: return "collect";
    case OperationKind::Simulate: return "simulate";
    case OperationKind::Analyze: return "analyze";
    case OperationKind::Train: return "train";
    case OperationKind::Deploy: return "deploy";
    case OperationKind::Estimate: return "estimate";
  }
  return "?";
}

OperationKind operation_kind_from_string(const std::string& s) {
  if (s == "collect") return OperationKind::Collect;
  if (s == "simulate") return OperationKind::Simulate;
  if (s == "analyze") return OperationKind::Analyze;
  if (s == "train") return OperationKind::Train;
  if (s == "deploy") return OperationKind::Deploy;
  if (s == "estimate") return OperationKind::Estimate;
  throw ParseError("", "unknown operation kind '" + s + "'");
}

const char* to_string(PlanChoice c) {
  switch (c) {
    case PlanChoice::Conventional: return "conventional";
    case PlanChoice::LocalAnalysis: return "local";
    case PlanChoice::MLSurrogate: return "surrogate";
  }
  return "?";
}

void OperationCostTable::set(OperationKind kind, const SiteId& site, CostEntry entry) {
  if (entry.unit_ns < 0 || entry.fixed_ns < 0)
    throw ParameterError("negative cost for " + std::string(to_string(kind)) + "@" + site);
  if (entry.fixed_ns != 0 && kind != OperationKind::Train)
    throw ParameterError("fixed cost only applies to train, got " +
                         std::string(to_string(kind)) + "@" + site);
  entries_[{kind, site}] = entry;
}

bool OperationCostTable::has(OperationKind kind, const SiteId& site) const {
  return entries_.count({kind, site}) != 0;
}

const CostEntry& OperationCostTable::lookup(OperationKind kind, const SiteId& site) const {
  auto it = entries_.find({kind, site});
  if (it == entries_.end())
    throw LookupError("no cost entry for operation '" + std::string(to_string(kind)) +
                      "' at site '" + site + "'");
  return it->second;
}

void LinkModel::validate() const {
  if (!(Rational(0) < rate_bytes_per_s))
    throw ParameterError("link rate must be positive");
  if (startup_ns < 0) throw ParameterError("link startup must be >= 0");
  if (rtt_ns < 0) throw ParameterError("link rtt must be >= 0");
  if (per_file_ns < 0) throw ParameterError("link per-file overhead must be >= 0");
}

void DatasetSpec::validate() const {
  if (datum_bytes <= 0) throw ParameterError("datum_bytes must be > 0");
  if (result_bytes <= 0) throw ParameterError("result_bytes must be > 0");
  if (model_bytes <= 0) throw ParameterError("model_bytes must be > 0");
  if (count_n < 0) throw ParameterError("count_n must be >= 0");
  if (file_count < 0) throw ParameterError("file_count must be >= 0");
  if (count_n > 0 && file_count < 1)
    throw ParameterError("file_count must be >= 1 when count_n > 0");
}

void PlanQuery::validate() const {
  dataset.validate();
  link.validate();
  if (!(Rational(0) < training_fraction && training_fraction <= Rational(1)))
    throw ParameterError("training fraction must be in (0, 1]");
  if (experiment_site.empty() || datacenter_site.empty())
    throw ParameterError("site ids must be non-empty");
}

}  // namespace edgeflow::cost
