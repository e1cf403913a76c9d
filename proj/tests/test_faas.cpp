#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <thread>

#include "edgeflow/faas/endpoint.hpp"
#include "edgeflow/faas/provider.hpp"
#include "edgeflow/faas/remote.hpp"
#include "testsupport.hpp"

using namespace edgeflow;
using namespace edgeflow::faas;
using testsupport::TempDir;

namespace {

EndpointInfo sim_info(int capacity) {
  EndpointInfo info;
  info.endpoint_id = "ep-sim";
  info.site = "dc";
  info.capacity = capacity;
  info.mode = "simulated";
  return info;
}

FunctionBody simulated_body(std::int64_t duration_ns) {
  FunctionBody body;
  body.simulated_duration_ns = duration_ns;
  return body;
}

TaskRecord wait_done(Endpoint& ep, const std::string& task_id, int timeout_ms = 5000) {
  for (int i = 0; i < timeout_ms; ++i) {
    TaskRecord rec = ep.poll(task_id);
    if (rec.state == TaskState::Done || rec.state == TaskState::Error) return rec;
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  FAIL("task did not finish in time");
  return {};
}

// Maximum number of concurrently running tasks implied by a transition log.
int max_concurrency(const std::vector<TaskTransition>& log) {
  int running = 0, peak = 0;
  for (const auto& t : log) {
    if (t.to == TaskState::Running) peak = std::max(peak, ++running);
    if (t.from == TaskState::Running && t.to != TaskState::Running) --running;
  }
  return peak;
}

}  // namespace

TEST_CASE("registration validates bodies") {
  util::VirtualClock clock;
  Endpoint ep(sim_info(1), clock);
  CHECK_THROWS_AS(ep.register_function(FunctionBody{}), ParameterError);  // empty command
  FunctionBody negative;
  negative.simulated_duration_ns = -1;
  CHECK_THROWS_AS(ep.register_function(negative), ParameterError);
  FunctionBody both = simulated_body(5);
  both.command = "echo hi";
  CHECK_THROWS_AS(ep.register_function(both), ParameterError);
  FunctionBody bad_template;
  bad_template.command = "echo {}";
  CHECK_THROWS_AS(ep.register_function(bad_template), ParameterError);
}

TEST_CASE("simulated task runs for exactly its registered duration") {
  util::VirtualClock clock;
  Endpoint ep(sim_info(1), clock);
  std::string fid = ep.register_function(simulated_body(19'000'000'000));
  std::string tid = ep.invoke(fid, Json::object());
  CHECK(clock.now_ns() == 0);  // invoke consumed no virtual time
  CHECK(ep.poll(tid).state == TaskState::Running);

  clock.advance_to(18'999'999'999);
  CHECK(ep.poll(tid).state == TaskState::Running);
  clock.advance_to(19'000'000'000);
  TaskRecord rec = ep.poll(tid);
  CHECK(rec.state == TaskState::Done);
  CHECK(rec.duration_ns() == 19'000'000'000);
  CHECK(rec.output["duration_ns"] == 19'000'000'000);
}

TEST_CASE("invoke rejects unknown functions and bad placeholders") {
  util::VirtualClock clock;
  Endpoint ep(sim_info(1), clock);
  CHECK_THROWS_AS(ep.invoke("f-nope", Json::object()), NotFoundError);
  FunctionBody body;
  body.command = "train --epochs {epochs}";
  std::string fid = ep.register_function(body);
  CHECK_THROWS_AS(ep.invoke(fid, Json::object()), ParameterError);  // missing placeholder
  CHECK_THROWS_AS(ep.poll("t-nope"), NotFoundError);
}

TEST_CASE("idempotent invoke returns the same task once") {
  util::VirtualClock clock;
  Endpoint ep(sim_info(1), clock);
  std::string fid = ep.register_function(simulated_body(1'000'000'000));
  std::string a = ep.invoke(fid, Json::object(), "key-1");
  std::string b = ep.invoke(fid, Json::object(), "key-1");
  CHECK(a == b);
  clock.advance_to(2'000'000'000);
  ep.tick(clock.now_ns());
  int running_transitions = 0;
  for (const auto& t : ep.transition_log())
    if (t.to == TaskState::Running) ++running_transitions;
  CHECK(running_transitions == 1);
}

TEST_CASE("capacity gates admissions; fifo order is preserved") {
  util::VirtualClock clock;
  Endpoint ep(sim_info(4), clock);
  CHECK(ep.capacity().running == 0);
  std::string fid = ep.register_function(simulated_body(10'000'000'000));
  std::vector<std::string> tasks;
  for (int i = 0; i < 5; ++i) tasks.push_back(ep.invoke(fid, Json{{"i", i}}));
  CHECK(ep.capacity().running == 4);
  CHECK(ep.capacity().queued == 1);
  CHECK(ep.poll(tasks[4]).state == TaskState::Queued);
  TaskRecord queued = ep.poll(tasks[4]);
  CHECK(queued.start_ns == -1);  // no timing fields yet

  // First slot frees at 10 s; the fifth task starts exactly then.
  clock.advance_to(10'000'000'000);
  TaskRecord fifth = ep.poll(tasks[4]);
  CHECK(fifth.state == TaskState::Running);
  CHECK(fifth.start_ns == 10'000'000'000);
  CHECK(max_concurrency(ep.transition_log()) == 4);
}

TEST_CASE("a single-slot endpoint executes in submission order") {
  util::VirtualClock clock;
  Endpoint ep(sim_info(1), clock);
  std::string fid = ep.register_function(simulated_body(1'000'000'000));
  std::vector<std::string> tasks;
  for (int i = 0; i < 10; ++i) tasks.push_back(ep.invoke(fid, Json{{"tag", i}}));
  clock.advance_to(100'000'000'000);
  ep.tick(clock.now_ns());

  std::vector<std::string> running_order;
  for (const auto& t : ep.transition_log())
    if (t.to == TaskState::Running) running_order.push_back(t.task_id);
  CHECK(running_order == tasks);
  CHECK(max_concurrency(ep.transition_log()) == 1);
  // Back-to-back: task i runs [i, i+1) seconds.
  for (int i = 0; i < 10; ++i) {
    TaskRecord rec = ep.poll(tasks[i]);
    CHECK(rec.start_ns == i * 1'000'000'000LL);
    CHECK(rec.end_ns == (i + 1) * 1'000'000'000LL);
  }
}

TEST_CASE("fail_running errors active tasks") {
  util::VirtualClock clock;
  Endpoint ep(sim_info(2), clock);
  std::string fid = ep.register_function(simulated_body(5'000'000'000));
  std::string tid = ep.invoke(fid, Json::object());
  clock.advance_to(1'000'000'000);
  ep.tick(clock.now_ns());
  ep.fail_running("endpoint crashed", clock.now_ns());
  TaskRecord rec = ep.poll(tid);
  CHECK(rec.state == TaskState::Error);
  CHECK(rec.error == "endpoint crashed");
  CHECK(rec.end_ns == 1'000'000'000);

  ep.set_down(true);
  CHECK_THROWS_AS(ep.invoke(fid, Json::object()), NetError);
  ep.set_down(false);
  CHECK_NOTHROW(ep.invoke(fid, Json::object()));
}

TEST_CASE("function registry survives endpoint restarts") {
  TempDir dir("faas-state");
  util::VirtualClock clock;
  std::string fid;
  {
    Endpoint ep(sim_info(1), clock, dir.str());
    fid = ep.register_function(simulated_body(19'000'000'000));
  }
  Endpoint again(sim_info(1), clock, dir.str());
  FunctionRegistration reg = again.function(fid);
  CHECK(reg.body.simulated_duration_ns == 19'000'000'000);
}

TEST_CASE("real endpoint runs commands") {
  util::SystemClock clock;
  EndpointInfo info;
  info.endpoint_id = "ep-real";
  info.site = "dc";
  info.capacity = 2;
  info.mode = "real";
  Endpoint ep(info, clock);

  FunctionBody echo;
  echo.command = "echo hello {name}";
  std::string fid = ep.register_function(echo);
  TaskRecord rec = wait_done(ep, ep.invoke(fid, Json{{"name", "world"}}));
  CHECK(rec.state == TaskState::Done);
  CHECK(rec.exit_code == 0);
  CHECK(rec.output["stdout"] == "hello world");
  CHECK(rec.duration_ns() >= 0);

  FunctionBody failing;
  failing.command = "exit 3";
  TaskRecord failed = wait_done(ep, ep.invoke(ep.register_function(failing), Json::object()));
  CHECK(failed.state == TaskState::Error);
  CHECK(failed.exit_code == 3);

  FunctionBody jsonout;
  jsonout.command = R"(echo '{{"answer": 42}}')";
  TaskRecord js = wait_done(ep, ep.invoke(ep.register_function(jsonout), Json::object()));
  CHECK(js.state == TaskState::Done);
  CHECK(js.output["result"]["answer"] == 42);
}

TEST_CASE("declared output artifacts are checked") {
  TempDir dir("faas-out");
  util::SystemClock clock;
  EndpointInfo info;
  info.endpoint_id = "ep-real";
  info.site = "dc";
  info.mode = "real";
  Endpoint ep(info, clock);

  FunctionBody producer;
  producer.command = "touch {path}";
  producer.outputs = {"{path}"};
  std::string fid = ep.register_function(producer);
  TaskRecord ok = wait_done(ep, ep.invoke(fid, Json{{"path", dir.file("model.pt")}}));
  CHECK(ok.state == TaskState::Done);

  FunctionBody liar;
  liar.command = "true";
  liar.outputs = {dir.file("never-created")};
  TaskRecord missing = wait_done(ep, ep.invoke(ep.register_function(liar), Json::object()));
  CHECK(missing.state == TaskState::Error);
  CHECK(missing.error.find("artifact") != std::string::npos);
}

TEST_CASE("purge drops completed records") {
  util::VirtualClock clock;
  Endpoint ep(sim_info(1), clock);
  std::string fid = ep.register_function(simulated_body(1'000'000'000));
  std::string tid = ep.invoke(fid, Json::object());
  clock.advance_to(2'000'000'000);
  CHECK(ep.poll(tid).state == TaskState::Done);
  ep.purge_completed();
  CHECK_THROWS_AS(ep.poll(tid), NotFoundError);
}

TEST_CASE("endpoint server speaks the framed protocol") {
  TempDir dir("faas-srv");
  util::SystemClock clock;
  EndpointInfo info;
  info.endpoint_id = "ep-wire";
  info.site = "dc";
  info.capacity = 3;
  info.mode = "real";
  Endpoint ep(info, clock);
  EndpointServer server(ep, dir.file("faas.sock"));

  EndpointClient client(server.socket_path());
  FunctionBody echo;
  echo.command = "echo ping";
  std::string fid = client.register_function(echo);
  std::string tid = client.invoke(fid, Json::object(), "wire-key");
  CHECK(client.invoke(fid, Json::object(), "wire-key") == tid);

  TaskRecord rec;
  for (int i = 0; i < 5000; ++i) {
    rec = client.poll(tid);
    if (rec.state == TaskState::Done || rec.state == TaskState::Error) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  CHECK(rec.state == TaskState::Done);
  CHECK(rec.output["stdout"] == "ping");

  Json cap = client.capacity();
  CHECK(cap["endpoint_id"] == "ep-wire");
  CHECK(cap["capacity"] == 3);
  CHECK_THROWS_AS(client.poll("t-missing"), NotFoundError);
  CHECK_THROWS_AS(client.invoke("f-missing", Json::object()), NotFoundError);
  server.stop();
}

TEST_CASE("compute provider bridges the endpoint into flows") {
  util::VirtualClock clock;
  Endpoint ep(sim_info(1), clock);
  std::string fid = ep.register_function(simulated_body(19'000'000'000));
  ComputeProvider provider(ep);

  flow::Invocation inv;
  inv.idempotency_key = "r1/train/1";
  inv.params = {{"function_id", fid}, {"args", Json::object()}};
  std::string handle = provider.dispatch(inv);
  CHECK(provider.dispatch(inv) == handle);  // dedupe

  flow::PollResult r = provider.poll(handle);
  CHECK(r.phase == flow::PollResult::Phase::Running);
  CHECK(provider.next_event_ns() == 19'000'000'000);
  clock.advance_to(19'000'000'000);
  r = provider.poll(handle);
  CHECK(r.phase == flow::PollResult::Phase::Succeeded);
  CHECK(r.start_ns == 0);
  CHECK(r.end_ns == 19'000'000'000);
}
