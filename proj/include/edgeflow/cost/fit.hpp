#pragma once

#include <cstdint>
#include <vector>

#include "edgeflow/cost/types.hpp"

namespace edgeflow::cost {

struct TransferObservation {
  std::int64_t bytes = 0;
  std::int64_t file_count = 0;
  double seconds = 0.0;
};

struct FitResult {
  LinkModel model;
  double rate_bytes_per_s = 0.0;  // fitted 1/slope
  double startup_s = 0.0;         // fitted intercept, before clamping
  double rms_residual_s = 0.0;
  double max_abs_residual_s = 0.0;
  std::size_t n_points = 0;
};

// Ordinary least squares on time = bytes/rate + startup. The intercept
// absorbs the per-file term (the file-count dependence has no established
// formula, so it is not fit separately). Requires at least three
// observations over at least two distinct byte counts; a non-positive
// fitted rate is an error. A slightly negative intercept (noise around a
// true zero startup) is clamped to zero in the returned model.
FitResult fit_link_model(const std::vector<TransferObservation>& observations);

}  // namespace edgeflow::cost
