#include "edgeflow/transfer/simlink.hpp"

#include <sstream>

#include "edgeflow/util/duration.hpp"

namespace edgeflow::transfer {

using util::Rational;

Rational SimWanLink::effective_rate_bps(int concurrency) const {
  if (concurrency < 1) throw ParameterError("concurrency must be >= 1");
  base.validate();
  if (per_stream_bps.is_zero()) return base.rate_bytes_per_s;
  Rational combined = Rational(concurrency) * per_stream_bps;
  return combined < base.rate_bytes_per_s ? combined : base.rate_bytes_per_s;
}

std::int64_t SimWanLink::duration_ns(std::int64_t bytes, std::int64_t file_count,
                                     int concurrency) const {
  cost::LinkModel effective = base;
  effective.rate_bytes_per_s = effective_rate_bps(concurrency);
  return cost::transfer_time_ns(bytes, file_count, effective);
}

std::vector<BenchRow> benchmark_simulated(const SimWanLink& link,
                                          const std::vector<int>& cc_values,
                                          std::int64_t bytes, std::int64_t file_count) {
  if (cc_values.empty()) throw ParameterError("benchmark needs at least one concurrency value");
  std::vector<BenchRow> rows;
  rows.reserve(cc_values.size());
  for (int cc : cc_values) {
    BenchRow row;
    row.concurrency = cc;
    row.bytes = bytes;
    row.duration_ns = link.duration_ns(bytes, file_count, cc);
    row.throughput_bps =
        row.duration_ns > 0 ? static_cast<double>(bytes) * 1e9 / row.duration_ns : 0.0;
    rows.push_back(row);
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "cc,bytes,seconds,throughput_bps\n";
  out.precision(15);
  for (const auto& r : rows)
    out << r.concurrency << "," << r.bytes << "," << util::ns_to_seconds_string(r.duration_ns)
        << "," << r.throughput_bps << "\n";
  return out.str();
}

}  // namespace edgeflow::transfer
