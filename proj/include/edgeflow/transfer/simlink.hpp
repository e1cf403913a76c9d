#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edgeflow/cost/model.hpp"
#include "edgeflow/cost/types.hpp"

namespace edgeflow::transfer {

// Capped wide-area link for virtual-time transfers: each stream moves at
// most per_stream bytes/s and all streams together at most the base link
// rate, so parallelism helps until the aggregate cap binds.
struct SimWanLink {
  cost::LinkModel base;                 // rate_bytes_per_s is the aggregate cap
  util::Rational per_stream_bps{0};     // 0: no per-stream cap

  util::Rational effective_rate_bps(int concurrency) const;
  // Virtual duration of one transfer batch: bytes at the effective rate
  // plus the link's startup and per-file terms. With concurrency 1 and no
  // per-stream cap this equals cost::transfer_time_ns exactly.
  std::int64_t duration_ns(std::int64_t bytes, std::int64_t file_count,
                           int concurrency) const;
};

struct BenchRow {
  int concurrency = 1;
  std::int64_t bytes = 0;
  std::int64_t duration_ns = 0;
  double throughput_bps = 0.0;
};

// One virtual transfer per concurrency level over a capped link.
std::vector<BenchRow> benchmark_simulated(const SimWanLink& link,
                                          const std::vector<int>& cc_values,
                                          std::int64_t bytes, std::int64_t file_count);

// CSV with header "cc,bytes,seconds,throughput_bps".
std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace edgeflow::transfer
