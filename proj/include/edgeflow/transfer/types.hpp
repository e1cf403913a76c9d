#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edgeflow/util/errors.hpp"
#include "edgeflow/util/jsonio.hpp"

namespace edgeflow::transfer {

using util::Json;

// Striped file-movement request. Source paths are local to the initiating
// endpoint; destination paths are relative to the receiving endpoint's
// root.
struct TransferSpec {
  std::vector<std::string> src_paths;
  std::vector<std::string> dst_paths;
  int concurrency = 0;  // stream count; 0 picks min(file_count, 8)
  std::int64_t chunk_bytes = 4 << 20;
  bool verify = true;  // digest comparison at the destination
  std::string idempotency_key;

  int effective_concurrency() const;
  void validate() const;
};

enum class TransferOutcome { InFlight, Succeeded, Failed, Cancelled };

const char* to_string(TransferOutcome o);

struct FileReport {
  std::string src;
  std::string dst;
  std::int64_t bytes = -1;       // source size; -1 when unreadable
  std::int64_t bytes_sent = 0;   // monotone progress counter
  std::int64_t start_ns = -1;
  std::int64_t end_ns = -1;
  std::string digest;            // source digest (algorithm in the report)
  int retries = 0;               // resend rounds that touched this file
  std::string state = "pending"; // pending | ok | failed | cancelled
  std::string error;

  std::int64_t duration_ns() const {
    return (start_ns >= 0 && end_ns >= 0) ? end_ns - start_ns : -1;
  }
};

struct TransferReport {
  std::string transfer_id;
  TransferOutcome outcome = TransferOutcome::InFlight;
  std::string digest_algorithm;
  int concurrency_used = 0;
  std::int64_t total_bytes = 0;      // bytes of files that completed
  std::int64_t first_start_ns = -1;
  std::int64_t last_end_ns = -1;
  std::vector<FileReport> files;

  double aggregate_throughput_bps() const {
    if (first_start_ns < 0 || last_end_ns <= first_start_ns) return 0.0;
    return static_cast<double>(total_bytes) * 1e9 /
           static_cast<double>(last_end_ns - first_start_ns);
  }
  Json to_json() const;
};

}  // namespace edgeflow::transfer
