#pragma once

#include <chrono>
#include <cstdint>
#include <thread>

#include "edgeflow/util/errors.hpp"

namespace edgeflow::util {

// Time source abstraction. Components that need "now" take a Clock& so the
// same code runs against wall time and against the simulator's virtual time.
class Clock {
public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ns() const = 0;
  virtual bool is_virtual() const = 0;
  // Block (real) or no-op (virtual; the event loop owns time).
  virtual void sleep_for_ns(std::int64_t ns) = 0;
};

class SystemClock final : public Clock {
public:
  std::int64_t now_ns() const override {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
  }
  bool is_virtual() const override { return false; }
  void sleep_for_ns(std::int64_t ns) override {
    if (ns > 0) std::this_thread::sleep_for(std::chrono::nanoseconds(ns));
  }
};

// Virtual time: advanced explicitly, never moves backwards.
class VirtualClock final : public Clock {
public:
  explicit VirtualClock(std::int64_t start_ns = 0) : now_(start_ns) {}

  std::int64_t now_ns() const override { return now_; }
  bool is_virtual() const override { return true; }
  void sleep_for_ns(std::int64_t) override {}

  void advance_to(std::int64_t t_ns) {
    if (t_ns < now_) throw StateError("virtual clock cannot move backwards");
    now_ = t_ns;
  }
  void advance_by(std::int64_t delta_ns) {
    if (delta_ns < 0) throw StateError("virtual clock cannot move backwards");
    now_ += delta_ns;
  }

private:
  std::int64_t now_;
};

}  // namespace edgeflow::util
