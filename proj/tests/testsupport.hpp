#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "edgeflow/cost/types.hpp"

namespace testsupport {

// The worked instance from the planner walkthrough: 1 GB/s link, remote
// analyze 2.44 us/datum, edge estimate 0.35 us/datum, 19 s training, 3 MB
// model, 8 B results, p = 0.1. The raw datum is an 11x11 16-bit patch
// (242 B); its wire cost rounds to 0.24 us at 1 GB/s and the planner
// instance charges exactly that, i.e. an effective 240 B on the wire.
inline edgeflow::cost::PlanQuery hedm_query(std::int64_t n) {
  using namespace edgeflow::cost;
  PlanQuery q;
  q.dataset.datum_bytes = 240;
  q.dataset.result_bytes = 8;
  q.dataset.model_bytes = 3'000'000;
  q.dataset.count_n = n;
  q.dataset.file_count = 1;
  q.training_fraction = edgeflow::util::Rational(1, 10);
  q.link.rate_bytes_per_s = edgeflow::util::Rational(1'000'000'000);
  q.costs.set(OperationKind::Analyze, "dc", {2440, 0});
  q.costs.set(OperationKind::Estimate, "ex", {350, 0});
  q.costs.set(OperationKind::Train, "dc", {0, 19'000'000'000});
  return q;
}

// Scratch directory removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("edgeflow-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
  std::filesystem::path path_;
};

}  // namespace testsupport
