// Copyright 2026 The Pilot-Quantum Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <future>
#include <thread>

#include "pilotq/agent.hpp"
#include "pilotq/error.hpp"

using namespace pilotq;

namespace {

ErrorCode code_of(const std::function<void()> &fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.code();
    }
    return ErrorCode::Internal;
}

struct Fixture {
    std::shared_ptr<Clock> clock;
    std::shared_ptr<EventLog> log;
    std::shared_ptr<BackendRegistry> backends;
    std::shared_ptr<FunctionRegistry> functions;

    explicit Fixture(std::shared_ptr<Clock> c = std::make_shared<SteadyClock>())
        : clock(std::move(c)), log(std::make_shared<EventLog>(clock)),
          backends(std::make_shared<BackendRegistry>(clock)),
          functions(FunctionRegistry::with_builtins()) {}

    AgentContext ctx() const { return {clock, log, backends, functions}; }

    PilotAllocation alloc(BackendKind kind, std::uint32_t cores, std::uint32_t qpu = 0,
                          QueueModel q = {}) {
        PilotDescription d;
        d.name = "p";
        d.backend_kind = kind;
        d.cores_per_node = cores;
        d.qpu_qubits = qpu;
        d.queue_model = q;
        return backends->get(kind).provision(d);
    }
};

TaskRecord scheduled(TaskDescription d, const std::string &pilot = "p") {
    return transition(make_record(std::move(d), 0.0), TaskEvent::schedule(pilot), 0.0);
}

} // namespace

TEST_CASE("worker bounds") {
    Fixture f;
    CHECK(code_of([&] { PilotAgent::start(f.alloc(BackendKind::Local, 8), 9, f.ctx()); }) ==
          ErrorCode::WorkerOversubscription);
    CHECK(code_of([&] { PilotAgent::start(f.alloc(BackendKind::Local, 8), 0, f.ctx()); }) ==
          ErrorCode::WorkerOversubscription);
    auto agent = PilotAgent::start(f.alloc(BackendKind::Local, 8), 8, f.ctx());
    CHECK(agent->workers() == 8);
    CHECK(agent->metrics() == AgentMetrics{});
}

TEST_CASE("readiness waits for the queue delay") {
    Fixture f(std::make_shared<ManualClock>(0.0));
    auto agent =
        PilotAgent::start(f.alloc(BackendKind::BatchSim, 2, 0, {37.0, 0.0, 0.0}), 2, f.ctx());
    const auto done = agent->execute_task(scheduled(TaskDescription::zero_compute("z")));
    CHECK(done.state == TaskState::Done);
    REQUIRE(agent->ready_at().has_value());
    CHECK(*agent->ready_at() >= 37.0);
    CHECK(*done.start_s >= 37.0);
}

TEST_CASE("payload kinds") {
    Fixture f;
    auto agent = PilotAgent::start(f.alloc(BackendKind::Local, 2), 2, f.ctx());

    auto z = agent->execute_task(scheduled(TaskDescription::zero_compute("z")));
    CHECK(z.state == TaskState::Done);
    CHECK(z.result->expectations.empty());

    QuantumPayload p;
    p.circuit = qsim::Circuit(2);
    p.circuit.h(0).cnot(0, 1);
    p.observables = {qsim::PauliObservable::single("ZZ")};
    auto q = agent->execute_task(scheduled(TaskDescription::quantum("q", p)));
    CHECK(q.state == TaskState::Done);
    CHECK(q.result->expectations.at(0) == doctest::Approx(1.0));

    auto r = agent->execute_task(scheduled(TaskDescription::classical("r", "raise")));
    CHECK(r.state == TaskState::Failed);
    CHECK(r.attempt == 1);
    CHECK(r.error->find("raised") != std::string::npos);

    auto u = agent->execute_task(scheduled(TaskDescription::classical("u", "nope")));
    CHECK(u.state == TaskState::Failed);

    auto retry = TaskDescription::classical("rr", "raise");
    retry.max_retries = 2;
    auto rr = agent->execute_task(scheduled(retry));
    CHECK(rr.state == TaskState::New);
    CHECK(rr.attempt == 1);

    p.gradient = true;
    p.circuit = qsim::Circuit(1);
    p.circuit.ry(0, M_PI / 2, 0);
    p.observables = {qsim::PauliObservable::single("Z")};
    auto g = agent->execute_task(scheduled(TaskDescription::quantum("g", p)));
    CHECK(g.state == TaskState::Done);
    CHECK(g.result->gradient.at(0) == doctest::Approx(-1.0));

    f.functions->add("echo", [](const nlohmann::json &a) { return a; });
    auto e = agent->execute_task(scheduled(TaskDescription::classical("e", "echo", {{"x", 3}})));
    CHECK(e.result->data["x"] == 3);

    const auto m = agent->metrics();
    CHECK(m.tasks_done == 4);
    // failed attempts, including the one that went back for a retry
    CHECK(m.tasks_failed == 3);
}

TEST_CASE("capacity bug and wrong assignment") {
    Fixture f;
    auto agent = PilotAgent::start(f.alloc(BackendKind::QpuSim, 1, 2), 1, f.ctx());
    QuantumPayload p;
    p.circuit = qsim::Circuit(3);
    p.shots = 10;
    auto r = agent->execute_task(scheduled(TaskDescription::quantum("big", p)));
    CHECK(r.state == TaskState::Failed);
    CHECK(r.error->find("QubitCapacityExceeded") != std::string::npos);

    CHECK(code_of([&] { agent->assign(scheduled(TaskDescription::zero_compute("x"), "other"), {}); }) ==
          ErrorCode::IllegalTransition);
    CHECK(code_of([&] {
              agent->assign(make_record(TaskDescription::zero_compute("y"), 0.0), {});
          }) == ErrorCode::IllegalTransition);
}

TEST_CASE("walltime expiry fails new dispatches") {
    auto clock = std::make_shared<ManualClock>(0.0);
    Fixture f(clock);
    PilotDescription d;
    d.name = "p";
    d.walltime_s = 10;
    auto agent = PilotAgent::start(f.backends->get(BackendKind::Local).provision(d), 1, f.ctx());
    CHECK(agent->execute_task(scheduled(TaskDescription::zero_compute("a"))).state ==
          TaskState::Done);
    clock->advance(11);
    const auto late = agent->execute_task(scheduled(TaskDescription::zero_compute("b")));
    CHECK(late.state == TaskState::Failed);
    CHECK(late.error->find("WalltimeExpired") != std::string::npos);
}

TEST_CASE("qpu_sim routes through the backend") {
    auto clock = std::make_shared<ManualClock>(0.0);
    Fixture f(clock);
    auto agent = PilotAgent::start(f.alloc(BackendKind::QpuSim, 1, 4, {0.0, 0.0, 0.5}), 1, f.ctx());
    QuantumPayload p;
    p.circuit = qsim::Circuit(2);
    p.circuit.x(1);
    p.shots = 50;
    p.observables = {qsim::PauliObservable::single("IZ")};
    const auto r = agent->execute_task(scheduled(TaskDescription::quantum("q", p)));
    REQUIRE(r.state == TaskState::Done);
    CHECK(r.result->counts == qsim::Counts{{"01", 50}});
    CHECK(r.result->expectations.at(0) == -1.0);
    CHECK(r.result->exec_s >= 0.5);
    CHECK(*r.end_s - *r.start_s >= 0.5);
}

TEST_CASE("multi-core tasks respect slot accounting") {
    Fixture f;
    auto agent = PilotAgent::start(f.alloc(BackendKind::Local, 4), 4, f.ctx());
    std::atomic<bool> stop{false};
    std::atomic<std::uint32_t> worst{0};
    std::thread monitor([&] {
        while (!stop) {
            const auto m = agent->metrics();
            worst = std::max<std::uint32_t>(worst, m.busy_cores);
            std::this_thread::sleep_for(std::chrono::microseconds(200));
        }
    });
    std::vector<std::future<TaskRecord>> futs;
    for (int i = 0; i < 40; ++i) {
        auto d = TaskDescription::classical("t" + std::to_string(i), "sleep", {{"seconds", 0.002}});
        d.requires_cores = 1 + i % 3;
        auto prom = std::make_shared<std::promise<TaskRecord>>();
        futs.push_back(prom->get_future());
        agent->assign(scheduled(d), [prom](const TaskRecord &r) { prom->set_value(r); });
    }
    for (auto &fu : futs) {
        CHECK(fu.get().state == TaskState::Done);
    }
    stop = true;
    monitor.join();
    CHECK(worst <= 4);
    auto big = TaskDescription::zero_compute("huge");
    big.requires_cores = 5;
    CHECK_FALSE(agent->fits(big));
}

TEST_CASE("busy cores never exceed workers under a 1000-task stress run") {
    Fixture f;
    auto agent = PilotAgent::start(f.alloc(BackendKind::Local, 8), 3, f.ctx());
    std::atomic<bool> stop{false};
    std::atomic<std::uint32_t> worst{0};
    std::thread monitor([&] {
        while (!stop) {
            worst = std::max<std::uint32_t>(worst, agent->metrics().busy_cores);
            std::this_thread::sleep_for(std::chrono::milliseconds(1));
        }
    });
    std::atomic<int> finished{0};
    for (int i = 0; i < 1000; ++i) {
        agent->assign(scheduled(TaskDescription::zero_compute("s" + std::to_string(i))),
                      [&](const TaskRecord &) { ++finished; });
    }
    const auto m = agent->shutdown(true);
    stop = true;
    monitor.join();
    CHECK(finished == 1000);
    CHECK(m.tasks_done == 1000);
    CHECK(worst <= 3);
}

TEST_CASE("shutdown semantics") {
    Fixture f;
    {
        auto agent = PilotAgent::start(f.alloc(BackendKind::Local, 1), 1, f.ctx());
        std::atomic<int> done{0};
        for (int i = 0; i < 10; ++i) {
            agent->assign(scheduled(TaskDescription::zero_compute("d" + std::to_string(i))),
                          [&](const TaskRecord &r) { done += r.state == TaskState::Done; });
        }
        const auto m = agent->shutdown(true);
        CHECK(m.tasks_done >= 10);
        CHECK(done == 10);
        CHECK(agent->shutdown(true) == m);
        CHECK(code_of([&] { agent->execute_task(scheduled(TaskDescription::zero_compute("late"))); }) ==
              ErrorCode::AgentStopped);
    }
    {
        auto agent = PilotAgent::start(f.alloc(BackendKind::Local, 1), 1, f.ctx());
        // hold the only worker so the next ten stay queued
        std::promise<void> release;
        auto gate = release.get_future().share();
        f.functions->add("block", [gate](const nlohmann::json &) {
            gate.wait();
            return nlohmann::json();
        });
        std::promise<void> started;
        agent->assign(scheduled(TaskDescription::classical("blocker", "block")), {},
                      [&](const TaskRecord &) { started.set_value(); });
        started.get_future().wait();
        std::atomic<int> canceled{0};
        for (int i = 0; i < 10; ++i) {
            agent->assign(scheduled(TaskDescription::zero_compute("c" + std::to_string(i))),
                          [&](const TaskRecord &r) { canceled += r.state == TaskState::Canceled; });
        }
        auto closing = std::async(std::launch::async, [&] { return agent->shutdown(false); });
        while (canceled < 10) {
            std::this_thread::yield();
        }
        release.set_value();
        const auto m = closing.get();
        CHECK(canceled == 10);
        CHECK(m.tasks_canceled == 10);
        CHECK(m.tasks_done == 1);
    }
    CHECK(f.backends->get(BackendKind::Local).in_use().allocations == 0);
}

TEST_CASE("events are emitted for every lifecycle step") {
    Fixture f;
    auto agent = PilotAgent::start(f.alloc(BackendKind::Local, 1), 1, f.ctx());
    agent->execute_task(scheduled(TaskDescription::zero_compute("a")));
    agent->execute_task(scheduled(TaskDescription::classical("b", "raise")));
    agent->shutdown(true);
    std::vector<std::string> names;
    for (const auto &e : f.log->snapshot()) {
        names.push_back(e.event);
    }
    const std::vector<std::string> want{"agent_ready", "task_started", "task_done", "task_started",
                                        "task_failed", "agent_stopped"};
    CHECK(names == want);
}
