#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <random>

#include "edgeflow/cost/fit.hpp"
#include "edgeflow/cost/model.hpp"
#include "edgeflow/cost/planconfig.hpp"
#include "testsupport.hpp"

using namespace edgeflow;
using namespace edgeflow::cost;
using util::Rational;
using testsupport::hedm_query;

namespace {

LinkModel gigabit_link() {
  LinkModel link;
  link.rate_bytes_per_s = Rational(1'000'000'000);
  return link;
}

// Random but exactly-representable plan queries: integer ns-per-byte rates
// and rational training fractions keep every assertion exact.
PlanQuery random_query(std::mt19937_64& rng) {
  auto pick = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };
  PlanQuery q;
  q.dataset.datum_bytes = pick(1, 4096);
  q.dataset.result_bytes = pick(1, 64);
  q.dataset.model_bytes = pick(1, 10'000'000);
  q.dataset.count_n = pick(0, 100'000'000);
  q.dataset.file_count = pick(1, 100);
  std::int64_t den = pick(1, 100);
  q.training_fraction = Rational(pick(1, den), den);
  q.link.rate_bytes_per_s = Rational(1'000'000'000, pick(1, 16));
  q.link.startup_ns = pick(0, 5'000'000'000);
  q.link.per_file_ns = pick(0, 1'000'000);
  q.costs.set(OperationKind::Analyze, "dc", {pick(1, 10'000), 0});
  q.costs.set(OperationKind::Estimate, "ex", {pick(1, 5'000), 0});
  q.costs.set(OperationKind::Train, "dc", {0, pick(0, 60'000'000'000)});
  return q;
}

}  // namespace

TEST_CASE("transfer time under the linear link model") {
  LinkModel link = gigabit_link();
  // 3 MB at 1 GB/s: 3000 us.
  CHECK(transfer_time_ns_exact(3'000'000, 1, link) == Rational(3'000'000));
  CHECK(transfer_time_s(3'000'000, 1, link) == doctest::Approx(0.003).epsilon(1e-12));
  // Empty transfer costs nothing.
  CHECK(transfer_time_ns(0, 0, link) == 0);
  // One 242-byte datum (11x11 patch, 16-bit pixels): 0.242 us, the 0.24 us
  // per-datum figure once rounded.
  CHECK(transfer_time_ns_exact(242, 0, link) == Rational(242));
  // Startup and per-file terms add in.
  link.startup_ns = 500'000'000;
  link.per_file_ns = 1'000'000;
  CHECK(transfer_time_ns(1'000'000, 10, link) == 1'000'000 + 500'000'000 + 10'000'000);

  LinkModel bad;
  bad.rate_bytes_per_s = Rational(0);
  CHECK_THROWS_AS(transfer_time_ns(1, 1, bad), ParameterError);
  CHECK_THROWS_AS(transfer_time_ns(-1, 0, gigabit_link()), ParameterError);
}

TEST_CASE("transfer time is monotone in bytes and files") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    LinkModel link;
    link.rate_bytes_per_s =
        Rational(1'000'000'000, std::uniform_int_distribution<std::int64_t>(1, 16)(rng));
    link.startup_ns = std::uniform_int_distribution<std::int64_t>(0, 1'000'000'000)(rng);
    link.per_file_ns = std::uniform_int_distribution<std::int64_t>(0, 1'000'000)(rng);
    std::int64_t b1 = std::uniform_int_distribution<std::int64_t>(0, 1'000'000'000)(rng);
    std::int64_t b2 = b1 + std::uniform_int_distribution<std::int64_t>(0, 1'000'000'000)(rng);
    std::int64_t f1 = std::uniform_int_distribution<std::int64_t>(0, 50)(rng);
    std::int64_t f2 = f1 + std::uniform_int_distribution<std::int64_t>(0, 50)(rng);
    CHECK(transfer_time_ns_exact(b1, f1, link) <= transfer_time_ns_exact(b2, f1, link));
    CHECK(transfer_time_ns_exact(b1, f1, link) <= transfer_time_ns_exact(b1, f2, link));
  }
}

TEST_CASE("conventional plan cost") {
  // Per-datum legs: 240 ns in, 2440 ns analyze, 8 ns back = 2688 ns.
  CHECK(eval_conventional_ns(hedm_query(0)) == Rational(0));
  CHECK(eval_conventional_ns(hedm_query(1)) == Rational(240 + 2440 + 8));
  CHECK(eval_conventional_ns(hedm_query(10'000'000)) == Rational(26'880'000'000));
  CHECK(eval_conventional_s(hedm_query(10'000'000)) == doctest::Approx(26.88).epsilon(1e-12));

  PlanQuery missing = hedm_query(10);
  missing.costs = OperationCostTable();
  missing.costs.set(OperationKind::Estimate, "ex", {350, 0});
  CHECK_THROWS_AS(eval_conventional_ns(missing), LookupError);
}

TEST_CASE("local plan cost") {
  PlanQuery q = hedm_query(0);
  q.costs.set(OperationKind::Analyze, "ex", {10'000, 0});
  CHECK(eval_local_ns(q) == Rational(0));
  q.dataset.count_n = 100;
  CHECK(eval_local_ns(q) == Rational(1'000'000));  // 1 ms
  // The reference instance has no local analyze entry: the plan is
  // unavailable, never silently zero.
  CHECK_THROWS_AS(eval_local_ns(hedm_query(100)), PlanUnavailableError);
}

TEST_CASE("surrogate plan cost") {
  CHECK(eval_surrogate_ns(hedm_query(0)) == Rational(19'003'000'000));
  CHECK(eval_surrogate_ns(hedm_query(1'000'000)) == Rational(19'586'800'000));
  CHECK(eval_surrogate_ns(hedm_query(20'000'000)) == Rational(30'679'000'000));
  CHECK(eval_surrogate_s(hedm_query(1'000'000)) == doctest::Approx(19.5868).epsilon(1e-12));

  PlanQuery per_datum_train = hedm_query(10);
  per_datum_train.costs.set(OperationKind::Train, "dc", {5, 19'000'000'000});
  CHECK_THROWS_AS(eval_surrogate_ns(per_datum_train), ParameterError);
}

TEST_CASE("plan choice at the reference sizes") {
  PlanVerdict small = choose_plan(hedm_query(1'000'000));
  CHECK(small.chosen == PlanChoice::Conventional);
  CHECK(*small.conventional_ns == Rational(2'688'000'000));
  CHECK(!small.local_ns);
  CHECK(small.unavailable.count("local") == 1);

  PlanVerdict large = choose_plan(hedm_query(20'000'000));
  CHECK(large.chosen == PlanChoice::MLSurrogate);
  CHECK(*large.conventional_ns == Rational(53'760'000'000));
  CHECK(*large.surrogate_ns == Rational(30'679'000'000));

  PlanQuery none = hedm_query(10);
  none.costs = OperationCostTable();
  CHECK_THROWS_AS(choose_plan(none), PlanUnavailableError);
}

TEST_CASE("exact cost ties resolve to the conventional plan") {
  // Both plans affine with equal value at N = 1000: conventional per-datum
  // 1200 ns vs surrogate 1100 ns + 100000 ns intercept.
  PlanQuery q;
  q.dataset.datum_bytes = 100;
  q.dataset.result_bytes = 100;
  q.dataset.model_bytes = 1000;
  q.dataset.file_count = 1;
  q.dataset.count_n = 1000;
  q.training_fraction = Rational(1, 2);
  q.link.rate_bytes_per_s = Rational(1'000'000'000);
  q.costs.set(OperationKind::Analyze, "dc", {1000, 0});
  q.costs.set(OperationKind::Estimate, "ex", {1000, 0});
  q.costs.set(OperationKind::Train, "dc", {0, 99'000});

  PlanVerdict v = choose_plan(q);
  REQUIRE(v.conventional_ns);
  REQUIRE(v.surrogate_ns);
  CHECK(*v.conventional_ns == *v.surrogate_ns);
  CHECK(v.chosen == PlanChoice::Conventional);

  CrossoverResult x = crossover(q);
  CHECK(x.exists);
  CHECK(x.n_star == 1000);
}

TEST_CASE("crossover at the reference constants") {
  // Slopes: conventional 2688 ns/datum, surrogate 583.8 ns/datum;
  // intercept gap 19.003e9 ns. Independent integer solve of
  // N >= 19.003e9 / 2104.2 = 95015000000 / 10521.
  const std::int64_t expected = (95'015'000'000 + 10521 - 1) / 10521;
  CHECK(expected == 9'030'986);

  CrossoverResult x = crossover(hedm_query(0));
  REQUIRE(x.exists);
  CHECK(x.n_star == expected);
  CHECK(x.n_star >= 9'000'000);
  CHECK(x.n_star <= 9'100'000);

  // Boundary check through the evaluators themselves.
  CHECK(eval_surrogate_ns(hedm_query(x.n_star)) <= eval_conventional_ns(hedm_query(x.n_star)));
  CHECK(eval_surrogate_ns(hedm_query(x.n_star - 1)) >
        eval_conventional_ns(hedm_query(x.n_star - 1)));
}

TEST_CASE("crossover edge cases") {
  // Equal slopes: no crossover.
  PlanQuery q = hedm_query(0);
  q.training_fraction = Rational(1);
  CrossoverResult none = crossover(q);
  CHECK(!none.exists);

  // Zero training cost and a cheaper surrogate slope: surrogate wins from
  // N = 0 only if its intercept also vanishes; with the 3 MB model return
  // the crossover lands where the model transfer is amortized.
  PlanQuery zero_train = hedm_query(0);
  zero_train.costs.set(OperationKind::Train, "dc", {0, 0});
  CrossoverResult x = crossover(zero_train);
  REQUIRE(x.exists);
  // Intercept gap is the 3e6 ns model return; slope gap 2104.2 ns/datum.
  CHECK(x.n_star == (30'000'000 + 21042 - 1) / 21042);
  CHECK(x.n_star == 1426);

  // Zero intercept entirely: surrogate never worse.
  PlanQuery free_model = zero_train;
  free_model.dataset.model_bytes = 1;
  free_model.link.per_file_ns = 0;
  free_model.link.startup_ns = 0;
  // model transfer still costs 1 ns; crossover at ceil(1/2104.2) = 1
  CrossoverResult y = crossover(free_model);
  REQUIRE(y.exists);
  CHECK(y.n_star == 1);
}

TEST_CASE("sweep emits evaluator-consistent rows") {
  auto rows = sweep(hedm_query(0), {0});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].conventional_ns == Rational(0));
  CHECK(rows[0].surrogate_ns == Rational(19'003'000'000));

  std::vector<std::int64_t> ns;
  for (std::int64_t n = 0; n <= 20'000'000; n += 2'000'000) ns.push_back(n);
  rows = sweep(hedm_query(0), ns);
  for (size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i - 1].conventional_ns <= rows[i].conventional_ns);
    CHECK(rows[i - 1].surrogate_ns <= rows[i].surrogate_ns);
  }
  // The conventional-minus-surrogate difference changes sign at N*.
  CrossoverResult x = crossover(hedm_query(0));
  auto boundary = sweep(hedm_query(0), {x.n_star - 1, x.n_star});
  CHECK(boundary[0].conventional_ns < boundary[0].surrogate_ns);
  CHECK(boundary[1].conventional_ns >= boundary[1].surrogate_ns);

  CHECK_THROWS_AS(sweep(hedm_query(0), {}), ParameterError);
  CHECK_THROWS_AS(sweep(hedm_query(0), {-1}), ParameterError);
}

TEST_CASE("sweep csv format") {
  auto rows = sweep(hedm_query(0), {0, 1'000'000});
  std::string csv = sweep_csv(rows);
  CHECK(csv ==
        "n,conventional_s,surrogate_s\n"
        "0,0,19.003\n"
        "1000000,2.688,19.5868\n");
}

TEST_CASE("evaluators are affine in the dataset size") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    PlanQuery q = random_query(rng);
    PlanQuery q0 = q, q1 = q;
    q0.dataset.count_n = 0;
    q1.dataset.count_n = 1;
    Rational c0 = eval_conventional_ns(q0);
    Rational cs = eval_conventional_ns(q1) - c0;
    Rational s0 = eval_surrogate_ns(q0);
    Rational ss = eval_surrogate_ns(q1) - s0;
    Rational n(q.dataset.count_n);
    CHECK(eval_conventional_ns(q) == c0 + n * cs);
    CHECK(eval_surrogate_ns(q) == s0 + n * ss);
    CHECK(!eval_conventional_ns(q).is_negative());
    CHECK(!eval_surrogate_ns(q).is_negative());
  }
}

TEST_CASE("p = 1 surrogate carries no estimate term") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 100; ++i) {
    PlanQuery q = random_query(rng);
    q.training_fraction = Rational(1);
    Rational n(q.dataset.count_n);
    Rational npb = Rational(1'000'000'000) / q.link.rate_bytes_per_s;
    Rational leg = Rational(q.link.startup_ns) +
                   Rational(q.dataset.file_count) * Rational(q.link.per_file_ns);
    Rational expected = n * Rational(q.dataset.datum_bytes) * npb + leg +
                        n * Rational(q.costs.lookup(OperationKind::Analyze, "dc").unit_ns) +
                        Rational(q.costs.lookup(OperationKind::Train, "dc").fixed_ns) +
                        (Rational(q.dataset.model_bytes) +
                         n * Rational(q.dataset.result_bytes)) *
                            npb +
                        Rational(q.link.startup_ns) + Rational(q.link.per_file_ns);
    CHECK(eval_surrogate_ns(q) == expected);
  }
}

TEST_CASE("plan choice is invariant under uniform time scaling") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    PlanQuery q = random_query(rng);
    if (i % 3 == 0) q.costs.set(OperationKind::Analyze, "ex", {400, 0});
    PlanVerdict base = choose_plan(q);

    for (std::int64_t k : {2, 10}) {
      PlanQuery scaled = q;
      scaled.link.rate_bytes_per_s = q.link.rate_bytes_per_s / Rational(k);
      scaled.link.startup_ns = q.link.startup_ns * k;
      scaled.link.per_file_ns = q.link.per_file_ns * k;
      OperationCostTable t;
      for (const auto& [key, entry] : q.costs.entries())
        t.set(key.first, key.second, {entry.unit_ns * k, entry.fixed_ns * k});
      scaled.costs = t;
      CHECK(choose_plan(scaled).chosen == base.chosen);
    }
  }
}

TEST_CASE("crossover agrees with the evaluators on random queries") {
  std::mt19937_64 rng(23);
  int found = 0;
  for (int i = 0; i < 1000; ++i) {
    PlanQuery q = random_query(rng);
    CrossoverResult x = crossover(q);
    if (!x.exists) continue;
    ++found;
    PlanQuery at = q;
    at.dataset.count_n = x.n_star;
    CHECK(eval_surrogate_ns(at) <= eval_conventional_ns(at));
    if (x.n_star > 0) {
      at.dataset.count_n = x.n_star - 1;
      CHECK(eval_surrogate_ns(at) > eval_conventional_ns(at));
    }
  }
  CHECK(found > 100);  // the generator must actually exercise the branch
}

TEST_CASE("link fit recovers noiseless parameters") {
  // Points generated from the model itself; the fit must invert it.
  const double v = 1e9, s = 0.5;
  std::vector<TransferObservation> obs;
  for (std::int64_t bytes : {1'000'000, 5'000'000, 25'000'000, 100'000'000, 400'000'000,
                             1'000'000'000}) {
    obs.push_back({bytes, 1, static_cast<double>(bytes) / v + s});
  }
  FitResult r = fit_link_model(obs);
  CHECK(r.rate_bytes_per_s == doctest::Approx(v).epsilon(1e-3 * 1e-1));  // 0.1%
  CHECK(r.startup_s == doctest::Approx(s).epsilon(1e-3 * 1e-1));
  CHECK(r.rms_residual_s < 1e-9);

  // Round-trip: the fitted model reproduces the generating transfer times.
  for (const auto& o : obs) {
    double t = transfer_time_s(o.bytes, 0, r.model);
    CHECK(t == doctest::Approx(o.seconds).epsilon(1e-9));
  }
}

TEST_CASE("link fit rejects bad designs") {
  CHECK_THROWS_AS(fit_link_model({{1000, 1, 0.1}, {2000, 1, 0.2}}), ParameterError);
  CHECK_THROWS_AS(
      fit_link_model({{1000, 1, 0.1}, {1000, 1, 0.11}, {1000, 1, 0.12}}), FitError);
  // Decreasing times with increasing bytes: negative rate.
  CHECK_THROWS_AS(fit_link_model({{1000, 1, 0.3}, {2000, 1, 0.2}, {3000, 1, 0.1}}), FitError);
}

TEST_CASE("link fit tolerates 5% multiplicative noise") {
  const double v = 1e9, s = 0.5;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> noise(0.95, 1.05);
  std::vector<TransferObservation> obs;
  for (int i = 0; i < 50; ++i) {
    auto bytes = static_cast<std::int64_t>(1e6 * std::pow(10.0, 3.0 * i / 49.0));
    double t = (static_cast<double>(bytes) / v + s) * noise(rng);
    obs.push_back({bytes, 1, t});
  }
  FitResult r = fit_link_model(obs);
  CHECK(std::fabs(r.rate_bytes_per_s - v) / v < 0.05);
}

TEST_CASE("plan query loads from key/value text") {
  const std::string text =
      "link.rate_bytes_per_s = 1e9\n"
      "link.startup = 0s\n"
      "link.rtt = 48ms\n"
      "dataset.datum_bytes = 240\n"
      "dataset.result_bytes = 8\n"
      "dataset.model_bytes = 3000000\n"
      "dataset.count = 1000000\n"
      "dataset.file_count = 1\n"
      "plan.training_fraction = 0.1\n"
      "cost.analyze.dc = 2.44us\n"
      "cost.estimate.ex = 0.35us\n"
      "cost.train.dc.fixed = 19s\n";
  PlanQuery q = load_plan_query(util::KvConfig::parse_text(text, "hedm.conf"));
  CHECK(q.dataset.count_n == 1'000'000);
  CHECK(q.link.rtt_ns == 48'000'000);
  CHECK(eval_conventional_ns(q) == Rational(2'688'000'000));
  CHECK(eval_surrogate_ns(q) == Rational(19'586'800'000));

  // Errors carry file:line.
  CHECK_THROWS_WITH_AS(
      load_plan_query(util::KvConfig::parse_text(text + "plan.typo = 1\n", "x.conf")),
      doctest::Contains("x.conf:13"), ParseError);
  CHECK_THROWS_WITH_AS(
      load_plan_query(util::KvConfig::parse_text(text + "cost.analyze.dc.fixed = 1s\n", "y.conf")),
      doctest::Contains("y.conf:13"), ParseError);
  std::string broken = text;
  broken.replace(broken.find("2.44us"), 6, "2.44");
  CHECK_THROWS_WITH_AS(load_plan_query(util::KvConfig::parse_text(broken, "z.conf")),
                       doctest::Contains("z.conf:10"), ParseError);
}
