#include "edgeflow/cost/model.hpp"

#include <sstream>

#include "edgeflow/util/duration.hpp"

namespace edgeflow::cost {

namespace {

constexpr std::int64_t kNsPerS = 1'000'000'000;

Rational ns_per_byte(const LinkModel& link) {
  return Rational(kNsPerS) / link.rate_bytes_per_s;
}

// Per-datum train costs are out of scope; the table entry must be a pure
// per-invocation constant.
std::int64_t train_fixed_ns(const PlanQuery& q) {
  const CostEntry& t = q.costs.lookup(OperationKind::Train, q.datacenter_site);
  if (t.unit_ns != 0)
    throw ParameterError("train cost must be per-invocation (fixed), not per-datum");
  return t.fixed_ns;
}

}  // namespace

Rational transfer_time_ns_exact(std::int64_t bytes, std::int64_t file_count,
                                const LinkModel& link) {
  if (bytes < 0) throw ParameterError("transfer bytes must be >= 0");
  if (file_count < 0) throw ParameterError("transfer file count must be >= 0");
  link.validate();
  return Rational(bytes) * ns_per_byte(link) + Rational(link.startup_ns) +
         Rational(file_count) * Rational(link.per_file_ns);
}

std::int64_t transfer_time_ns(std::int64_t bytes, std::int64_t file_count,
                              const LinkModel& link) {
  return transfer_time_ns_exact(bytes, file_count, link).round_int64();
}

double transfer_time_s(std::int64_t bytes, std::int64_t file_count, const LinkModel& link) {
  return (transfer_time_ns_exact(bytes, file_count, link) / Rational(kNsPerS)).to_double();
}

Rational eval_conventional_ns(const PlanQuery& q) {
  q.validate();
  const DatasetSpec& ds = q.dataset;
  Rational n(ds.count_n);
  Rational npb = ns_per_byte(q.link);
  Rational leg_fixed =
      Rational(q.link.startup_ns) + Rational(ds.file_count) * Rational(q.link.per_file_ns);

  Rational move_in = n * Rational(ds.datum_bytes) * npb + leg_fixed;
  Rational analyze = n * Rational(q.costs.lookup(OperationKind::Analyze, q.datacenter_site).unit_ns);
  Rational move_back = n * Rational(ds.result_bytes) * npb + leg_fixed;
  return move_in + analyze + move_back;
}

Rational eval_local_ns(const PlanQuery& q) {
  q.validate();
  if (!q.costs.has(OperationKind::Analyze, q.experiment_site))
    throw PlanUnavailableError("local analysis plan unavailable: no cost entry for 'analyze' at site '" +
                               q.experiment_site + "'");
  return Rational(q.dataset.count_n) *
         Rational(q.costs.lookup(OperationKind::Analyze, q.experiment_site).unit_ns);
}

Rational eval_surrogate_ns(const PlanQuery& q) {
  q.validate();
  const DatasetSpec& ds = q.dataset;
  Rational n(ds.count_n);
  Rational labeled = q.training_fraction * n;
  Rational npb = ns_per_byte(q.link);
  Rational leg_fixed =
      Rational(q.link.startup_ns) + Rational(ds.file_count) * Rational(q.link.per_file_ns);

  Rational move_in = labeled * Rational(ds.datum_bytes) * npb + leg_fixed;
  Rational analyze =
      labeled * Rational(q.costs.lookup(OperationKind::Analyze, q.datacenter_site).unit_ns);
  Rational train(train_fixed_ns(q));
  // Model comes back as one file; the labeled results ride along and add
  // only their byte time.
  Rational move_model = (Rational(ds.model_bytes) + labeled * Rational(ds.result_bytes)) * npb +
                        Rational(q.link.startup_ns) + Rational(q.link.per_file_ns);
  Rational estimate =
      (n - labeled) * Rational(q.costs.lookup(OperationKind::Estimate, q.experiment_site).unit_ns);
  return move_in + analyze + train + move_model + estimate;
}

double eval_conventional_s(const PlanQuery& q) {
  return PlanVerdict::seconds(eval_conventional_ns(q));
}

double eval_local_s(const PlanQuery& q) { return PlanVerdict::seconds(eval_local_ns(q)); }

double eval_surrogate_s(const PlanQuery& q) {
  return PlanVerdict::seconds(eval_surrogate_ns(q));
}

PlanVerdict choose_plan(const PlanQuery& q) {
  PlanVerdict v;
  auto attempt = [&](const char* name, Rational (*eval)(const PlanQuery&),
                     std::optional<Rational>& slot) {
    try {
      slot = eval(q);
    } catch (const LookupError& e) {
      v.unavailable[name] = e.what();
    } catch (const PlanUnavailableError& e) {
      v.unavailable[name] = e.what();
    }
  };
  attempt("conventional", eval_conventional_ns, v.conventional_ns);
  attempt("local", eval_local_ns, v.local_ns);
  attempt("surrogate", eval_surrogate_ns, v.surrogate_ns);

  // Tie-break order: conventional, then local, then surrogate.
  std::optional<Rational> best;
  if (v.conventional_ns && (!best || *v.conventional_ns < *best)) {
    best = v.conventional_ns;
    v.chosen = PlanChoice::Conventional;
  }
  if (v.local_ns && (!best || *v.local_ns < *best)) {
    best = v.local_ns;
    v.chosen = PlanChoice::LocalAnalysis;
  }
  if (v.surrogate_ns && (!best || *v.surrogate_ns < *best)) {
    best = v.surrogate_ns;
    v.chosen = PlanChoice::MLSurrogate;
  }
  if (!best) {
    std::string detail;
    for (const auto& [name, why] : v.unavailable) detail += "\n  " + name + ": " + why;
    throw PlanUnavailableError("no plan is evaluable:" + detail);
  }
  return v;
}

CrossoverResult crossover(const PlanQuery& q) {
  // Both plans are affine in N; take intercept and slope from the
  // evaluators themselves so this stays consistent with them by
  // construction.
  PlanQuery at0 = q;
  at0.dataset.count_n = 0;
  at0.dataset.file_count = q.dataset.file_count > 0 ? q.dataset.file_count : 1;
  PlanQuery at1 = at0;
  at1.dataset.count_n = 1;

  Rational conv0 = eval_conventional_ns(at0);
  Rational conv_slope = eval_conventional_ns(at1) - conv0;
  Rational surr0 = eval_surrogate_ns(at0);
  Rational surr_slope = eval_surrogate_ns(at1) - surr0;

  CrossoverResult r;
  if (!(surr_slope < conv_slope)) return r;  // parallel or diverging: no crossover

  // Smallest integer N with surr0 + N*surr_slope <= conv0 + N*conv_slope.
  Rational threshold = (surr0 - conv0) / (conv_slope - surr_slope);
  std::int64_t n = threshold.ceil_int64();
  r.exists = true;
  r.n_star = n < 0 ? 0 : n;
  return r;
}

std::vector<SweepRow> sweep(const PlanQuery& q, const std::vector<std::int64_t>& n_values) {
  if (n_values.empty()) throw ParameterError("sweep needs at least one dataset size");
  std::vector<SweepRow> rows;
  rows.reserve(n_values.size());
  PlanQuery qq = q;
  for (std::int64_t n : n_values) {
    if (n < 0) throw ParameterError("sweep dataset sizes must be >= 0");
    qq.dataset.count_n = n;
    if (qq.dataset.file_count < 1) qq.dataset.file_count = 1;
    rows.push_back({n, eval_conventional_ns(qq), eval_surrogate_ns(qq)});
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "n,conventional_s,surrogate_s\n";
  for (const auto& r : rows)
    out << r.n << "," << util::rational_ns_to_seconds_string(r.conventional_ns) << ","
        << util::rational_ns_to_seconds_string(r.surrogate_ns) << "\n";
  return out.str();
}

}  // namespace edgeflow::cost
