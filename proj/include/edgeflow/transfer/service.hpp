#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "edgeflow/transfer/types.hpp"
#include "edgeflow/util/clock.hpp"
#include "edgeflow/util/frame.hpp"
#include "edgeflow/util/ids.hpp"

namespace edgeflow::transfer {

// Opens connections to a destination endpoint. Tests interpose fault
// injection (stream kills) and WAN emulation here.
class StreamFactory {
public:
  virtual ~StreamFactory() = default;
  virtual std::unique_ptr<util::Stream> open() = 0;
};

// Connects to a unix socket path.
class UnixStreamFactory final : public StreamFactory {
public:
  explicit UnixStreamFactory(std::string path) : path_(std::move(path)) {}
  std::unique_ptr<util::Stream> open() override { return util::unix_connect(path_); }

private:
  std::string path_;
};

// Wraps a factory and kills selected streams after a byte budget; armed
// kills apply to the next streams the factory opens.
class FaultInjectingFactory final : public StreamFactory {
public:
  explicit FaultInjectingFactory(std::shared_ptr<StreamFactory> inner)
      : inner_(std::move(inner)) {}
  // The n-th opened stream (0-based) dies after writing `after_bytes`.
  void arm_kill(int nth_stream, std::int64_t after_bytes);
  std::unique_ptr<util::Stream> open() override;
  int opened() const { return opened_; }

private:
  std::shared_ptr<StreamFactory> inner_;
  std::mutex mu_;
  std::map<int, std::int64_t> kills_;
  std::atomic<int> opened_{0};
};

// Token-bucket pacing plus a fixed setup latency: desk-scale WAN
// emulation for real-mode tests.
class PacedStream final : public util::Stream {
public:
  PacedStream(std::unique_ptr<util::Stream> inner, double rate_bytes_per_s,
              std::int64_t latency_ns);
  void write_all(const void* data, std::size_t len) override;
  std::size_t read_some(void* data, std::size_t len) override;
  void shutdown() override;

private:
  std::unique_ptr<util::Stream> inner_;
  double rate_;
  std::int64_t latency_ns_;
  bool connected_ = false;
};

// Source-side push engine: splits files into chunks, stripes them over cc
// data streams, retries lost chunks on fresh streams, and verifies per-file
// digests with the destination. Multiple transfers run concurrently; status
// reads are lock-brief snapshots.
class TransferService {
public:
  explicit TransferService(std::shared_ptr<StreamFactory> factory,
                           std::shared_ptr<util::IdGen> ids = nullptr);
  ~TransferService();

  // Asynchronous; returns a transfer id immediately. A repeated
  // idempotency key returns the original transfer.
  std::string submit(const TransferSpec& spec);
  TransferReport status(const std::string& transfer_id) const;
  void cancel(const std::string& transfer_id);
  // Blocks until the transfer leaves InFlight.
  TransferReport wait(const std::string& transfer_id);

  // Resend rounds after the first pass (lost chunks ride fresh streams).
  static constexpr int kMaxRounds = 5;

private:
  struct Live;
  void run_transfer(std::shared_ptr<Live> live);

  std::shared_ptr<StreamFactory> factory_;
  std::shared_ptr<util::IdGen> ids_;
  util::SystemClock clock_;

  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Live>> transfers_;
  std::map<std::string, std::string> idempotency_;
  std::vector<std::thread> workers_;
  std::atomic<bool> stopping_{false};
};

}  // namespace edgeflow::transfer
