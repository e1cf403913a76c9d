#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "edgeflow/util/errors.hpp"
#include "edgeflow/util/rational.hpp"

namespace edgeflow::cost {

using util::Rational;

// The six basic operations a processing plan is built from.
enum class OperationKind { Collect, Simulate, Analyze, Train, Deploy, Estimate };

const char* to_string(OperationKind k);
OperationKind operation_kind_from_string(const std::string& s);

using SiteId = std::string;

// Per-site unit costs. Most operations are charged per datum; Train is a
// per-invocation fixed cost (training time does not scale with the labeled
// subset here, it is profiled as a constant for a given system).
struct CostEntry {
  std::int64_t unit_ns = 0;   // per datum
  std::int64_t fixed_ns = 0;  // per invocation (Train only)
};

class OperationCostTable {
public:
  void set(OperationKind kind, const SiteId& site, CostEntry entry);
  bool has(OperationKind kind, const SiteId& site) const;
  // Missing entries are an error, never a silent zero.
  const CostEntry& lookup(OperationKind kind, const SiteId& site) const;

  const std::map<std::pair<OperationKind, SiteId>, CostEntry>& entries() const {
    return entries_;
  }

private:
  std::map<std::pair<OperationKind, SiteId>, CostEntry> entries_;
};

// Linear wide-area transfer model: time = bytes/rate + startup, where the
// startup grows with the number of files. The per-file slope is exposed as
// a parameter; zero by default.
struct LinkModel {
  Rational rate_bytes_per_s;         // > 0
  std::int64_t startup_ns = 0;       // per-transfer fixed cost
  std::int64_t rtt_ns = 0;           // round trip; one-way latency is rtt/2
  std::int64_t per_file_ns = 0;      // additional startup per file

  void validate() const;
};

struct DatasetSpec {
  std::int64_t datum_bytes = 0;   // raw datum size
  std::int64_t result_bytes = 0;  // analysis result size (estimated results share it)
  std::int64_t model_bytes = 0;   // trained model size
  std::int64_t count_n = 0;       // number of data
  std::int64_t file_count = 1;    // files holding the data

  void validate() const;
};

struct PlanQuery {
  DatasetSpec dataset;
  Rational training_fraction;  // p in (0, 1]
  LinkModel link;
  OperationCostTable costs;
  SiteId experiment_site = "ex";
  SiteId datacenter_site = "dc";

  void validate() const;
};

enum class PlanChoice { Conventional, LocalAnalysis, MLSurrogate };

const char* to_string(PlanChoice c);

// Costs of every evaluable plan plus the decision. Exact nanosecond
// rationals internally; seconds accessors for reporting.
struct PlanVerdict {
  std::optional<Rational> conventional_ns;
  std::optional<Rational> local_ns;
  std::optional<Rational> surrogate_ns;
  std::map<std::string, std::string> unavailable;  // plan name -> reason
  PlanChoice chosen = PlanChoice::Conventional;

  static double seconds(const Rational& ns) {
    return (ns / Rational(1'000'000'000)).to_double();
  }
};

// Crossover result: the smallest dataset size at which the surrogate plan
// is no more expensive than the conventional one, if such a size exists.
struct CrossoverResult {
  bool exists = false;
  std::int64_t n_star = 0;
};

struct SweepRow {
  std::int64_t n = 0;
  Rational conventional_ns;
  Rational surrogate_ns;
};

}  // namespace edgeflow::cost
