#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <thread>

#include "edgeflow/util/digest.hpp"
#include "edgeflow/util/duration.hpp"
#include "edgeflow/util/frame.hpp"
#include "edgeflow/util/kvconfig.hpp"
#include "edgeflow/util/rational.hpp"

using namespace edgeflow;
using util::Rational;

TEST_CASE("rational basics") {
  Rational a = Rational::from_decimal("0.1");
  CHECK(a == Rational(1, 10));
  CHECK((a * Rational(10)).to_int64_exact() == 1);
  CHECK(Rational::from_decimal("2.44") == Rational(61, 25));
  CHECK(Rational::from_decimal("1e9").to_int64_exact() == 1'000'000'000);
  CHECK(Rational::from_decimal("-3.5e-2") == Rational(-35, 1000));
  CHECK(Rational::from_decimal("19").to_int64_exact() == 19);
  CHECK_THROWS_AS(Rational::from_decimal("abc"), ParseError);
  CHECK_THROWS_AS(Rational::from_decimal(""), ParseError);
  CHECK_THROWS_AS(Rational(1, 0), ParameterError);
}

TEST_CASE("rational arithmetic and comparisons") {
  Rational third(1, 3);
  Rational sixth(1, 6);
  CHECK(third + sixth == Rational(1, 2));
  CHECK(third - sixth == sixth);
  CHECK(third * Rational(3) == Rational(1));
  CHECK(third / third == Rational(1));
  CHECK(sixth < third);
  CHECK(Rational(-1, 2) < Rational(1, 3));
  CHECK(Rational(7, 2).floor_int64() == 3);
  CHECK(Rational(7, 2).ceil_int64() == 4);
  CHECK(Rational(7, 2).round_int64() == 4);
  CHECK(Rational(-7, 2).floor_int64() == -4);
  CHECK(Rational(-7, 2).ceil_int64() == -3);
  CHECK(Rational(5, 2).round_int64() == 3);  // half away from zero
  CHECK_THROWS_AS(Rational(1, 3).to_int64_exact(), ParameterError);
}

TEST_CASE("rational from_double is exact") {
  for (double v : {0.0, 1.0, 0.5, 0.1, 1e9, 1.0083e9, -2.75}) {
    CHECK(Rational::from_double(v).to_double() == v);
  }
}

TEST_CASE("rational decimal rendering") {
  CHECK(Rational(31'000'000'000).to_decimal_string() == "31000000000");
  CHECK(Rational(1, 10).to_decimal_string() == "0.1");
  CHECK(Rational(61, 25).to_decimal_string() == "2.44");
  CHECK(Rational(-5, 4).to_decimal_string() == "-1.25");
  CHECK(Rational(0).to_decimal_string() == "0");
}

TEST_CASE("duration parsing is nanosecond exact") {
  CHECK(util::parse_duration_ns("19s") == 19'000'000'000);
  CHECK(util::parse_duration_ns("2.44us") == 2440);
  CHECK(util::parse_duration_ns("0.35us") == 350);
  CHECK(util::parse_duration_ns("48ms") == 48'000'000);
  CHECK(util::parse_duration_ns("0s") == 0);
  CHECK(util::parse_duration_ns("3000us") == 3'000'000);
  CHECK_THROWS_AS(util::parse_duration_ns("1.5ns"), ParseError);  // sub-ns
  CHECK_THROWS_AS(util::parse_duration_ns("10"), ParseError);     // no unit
  CHECK_THROWS_AS(util::parse_duration_ns("-3s"), ParseError);
  CHECK(util::parse_duration_ns_signed("-3s") == -3'000'000'000);
}

TEST_CASE("seconds formatting") {
  CHECK(util::ns_to_seconds_string(31'000'000'000) == "31");
  CHECK(util::ns_to_seconds_string(19'586'800'000) == "19.5868");
  CHECK(util::ns_to_seconds_string(2688) == "0.000002688");
  CHECK(util::ns_to_seconds_fixed(19'586'800'000, 3) == "19.587");
  CHECK(util::ns_to_seconds_fixed(31'000'000'000, 3) == "31.000");
  CHECK(util::ns_to_seconds_fixed(2'499'999, 3) == "0.002");
}

TEST_CASE("kv config parse and errors") {
  auto cfg = util::KvConfig::parse_text(
      "# comment\n"
      "a.b = 12\n"
      "a.c = 2.44us   # trailing comment\n"
      "name = hello\n",
      "test.conf");
  CHECK(cfg.require_int("a.b") == 12);
  CHECK(cfg.require_duration_ns("a.c") == 2440);
  CHECK(cfg.require("name") == "hello");
  CHECK(cfg.line_of("a.c") == 3);
  CHECK(!cfg.has("missing"));
  CHECK(cfg.int_or("missing", 7) == 7);

  CHECK_THROWS_WITH_AS(util::KvConfig::parse_text("a = 1\na = 2\n", "dup.conf"),
                       doctest::Contains("dup.conf:2"), ParseError);
  CHECK_THROWS_WITH_AS(util::KvConfig::parse_text("just text\n", "bad.conf"),
                       doctest::Contains("bad.conf:1"), ParseError);
  CHECK_THROWS_WITH_AS(cfg.require_duration_ns("a.b"), doctest::Contains("test.conf:2"),
                       ParseError);
}

TEST_CASE("fnv digest") {
  CHECK(util::digest_bytes_hex("", 0) == "cbf29ce484222325");
  // Known FNV-1a vector.
  CHECK(util::digest_bytes_hex("a", 1) == "af63dc4c8601ec8c");
  CHECK(util::digest_bytes_hex("hello", 5) != util::digest_bytes_hex("hellp", 5));
}

TEST_CASE("frames round-trip over a socket pair") {
  auto [a, b] = util::stream_pair();
  util::Json header = {{"op", "PING"}, {"n", 42}};
  std::vector<std::uint8_t> blob = {1, 2, 3, 4, 5};
  util::send_frame(*a, header, blob.data(), blob.size());
  util::send_frame(*a, {{"op", "EMPTY"}});
  a->shutdown();

  util::Frame f;
  REQUIRE(util::recv_frame(*b, f));
  CHECK(f.header["op"] == "PING");
  CHECK(f.header["n"] == 42);
  CHECK(f.blob == blob);
  REQUIRE(util::recv_frame(*b, f));
  CHECK(f.header["op"] == "EMPTY");
  CHECK(f.blob.empty());
  CHECK(!util::recv_frame(*b, f));  // clean EOF
}

TEST_CASE("unix listener accepts connections") {
  std::string path = "/tmp/edgeflow-test-" + std::to_string(::getpid()) + ".sock";
  util::UnixListener listener(path);
  std::thread server([&] {
    auto conn = listener.accept();
    REQUIRE(conn);
    util::Frame f;
    REQUIRE(util::recv_frame(*conn, f));
    util::send_frame(*conn, {{"echo", f.header["msg"]}});
  });
  auto client = util::unix_connect(path);
  util::send_frame(*client, {{"msg", "hi"}});
  util::Frame reply;
  REQUIRE(util::recv_frame(*client, reply));
  CHECK(reply.header["echo"] == "hi");
  server.join();
}

TEST_CASE("strict json rejects duplicate keys") {
  CHECK_THROWS_AS(util::parse_json_strict(R"({"a":1,"a":2})"), ParseError);
  auto j = util::parse_json_strict(R"({"b":1,"a":2})");
  auto it = j.begin();
  CHECK(it.key() == "b");  // ordered
}
