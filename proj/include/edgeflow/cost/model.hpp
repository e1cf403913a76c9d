#pragma once

#include <cstdint>
#include <vector>

#include "edgeflow/cost/types.hpp"

namespace edgeflow::cost {

// Wide-area transfer time under the linear link model:
//   bytes / rate + startup + file_count * per_file
// Exact rational nanoseconds; the seconds and rounded-ns forms are derived
// from it so every caller agrees on the same arithmetic.
Rational transfer_time_ns_exact(std::int64_t bytes, std::int64_t file_count,
                                const LinkModel& link);
std::int64_t transfer_time_ns(std::int64_t bytes, std::int64_t file_count,
                              const LinkModel& link);
double transfer_time_s(std::int64_t bytes, std::int64_t file_count, const LinkModel& link);

// End-to-end cost of the three processing plans, as functions of the
// dataset size in the query. All are affine in N.
//
// Conventional: ship N raw data to the data center, analyze there, return
// N results. Each direction is one bulk transfer and charges the link
// startup once.
Rational eval_conventional_ns(const PlanQuery& q);

// All-local: analyze every datum at the experiment site; no transfers.
// Throws PlanUnavailableError when no local analyze cost is configured.
Rational eval_local_ns(const PlanQuery& q);

// Surrogate: ship the labeled fraction p of the data, analyze and train
// remotely, return the model plus the labeled results (their return rides
// the model transfer and adds no extra startup), then estimate the
// remaining (1-p) fraction at the experiment site.
Rational eval_surrogate_ns(const PlanQuery& q);

// Seconds convenience wrappers.
double eval_conventional_s(const PlanQuery& q);
double eval_local_s(const PlanQuery& q);
double eval_surrogate_s(const PlanQuery& q);

// Cost every evaluable plan and pick the cheapest. Exact ties prefer
// Conventional, then LocalAnalysis, then MLSurrogate. Throws if no plan is
// evaluable.
PlanVerdict choose_plan(const PlanQuery& q);

// Smallest N at which the surrogate plan is no more expensive than the
// conventional one, solved in closed form from the two affine models.
// No crossover when the conventional per-datum slope does not strictly
// exceed the surrogate's.
CrossoverResult crossover(const PlanQuery& q);

// Evaluate both remote plans over a list of dataset sizes (the data behind
// a cost-versus-size chart).
std::vector<SweepRow> sweep(const PlanQuery& q, const std::vector<std::int64_t>& n_values);

// CSV with header "n,conventional_s,surrogate_s"; seconds are exact
// decimal strings.
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace edgeflow::cost
