#include "edgeflow/cost/fit.hpp"

#include <cmath>
#include <set>

namespace edgeflow::cost {

FitResult fit_link_model(const std::vector<TransferObservation>& observations) {
  if (observations.size() < 3)
    throw ParameterError("link fit needs at least 3 observations, got " +
                         std::to_string(observations.size()));
  std::set<std::int64_t> distinct;
  for (const auto& o : observations) {
    if (o.bytes < 0 || o.seconds < 0.0)
      throw ParameterError("link fit observations must be non-negative");
    distinct.insert(o.bytes);
  }
  if (distinct.size() < 2)
    throw FitError("degenerate design: all observations share one byte count");

  double sx = 0, sxx = 0, sxy = 0, sy = 0;
  const auto n = static_cast<double>(observations.size());
  for (const auto& o : observations) {
    auto x = static_cast<double>(o.bytes);
    sx += x;
    sxx += x * x;
    sxy += x * o.seconds;
    sy += o.seconds;
  }
  double denom = n * sxx - sx * sx;
  if (denom <= 0.0) throw FitError("degenerate design matrix");
  double slope = (n * sxy - sx * sy) / denom;  // seconds per byte
  double intercept = (sy - slope * sx) / n;    // seconds

  if (slope <= 0.0) throw FitError("fitted transfer rate is not positive");

  FitResult r;
  r.rate_bytes_per_s = 1.0 / slope;
  r.startup_s = intercept;
  r.n_points = observations.size();

  double sse = 0, max_abs = 0;
  for (const auto& o : observations) {
    double pred = slope * static_cast<double>(o.bytes) + intercept;
    double res = o.seconds - pred;
    sse += res * res;
    max_abs = std::max(max_abs, std::fabs(res));
  }
  r.rms_residual_s = std::sqrt(sse / n);
  r.max_abs_residual_s = max_abs;

  r.model.rate_bytes_per_s = Rational::from_double(r.rate_bytes_per_s);
  double startup_clamped = intercept < 0.0 ? 0.0 : intercept;
  r.model.startup_ns = static_cast<std::int64_t>(std::llround(startup_clamped * 1e9));
  r.model.rtt_ns = 0;
  r.model.per_file_ns = 0;
  r.model.validate();
  return r;
}

}  // namespace edgeflow::cost
