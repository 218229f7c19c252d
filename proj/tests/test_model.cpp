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

#include <optional>
#include <random>

#include "pilotq/error.hpp"
#include "pilotq/model.hpp"
#include "pilotq/qsim/ansatz.hpp"

using namespace pilotq;
using K = TaskEvent::Kind;

namespace {

std::string error_text(const std::function<void()> &fn, ErrorCode *code = nullptr) {
    try {
        fn();
    } catch (const Error &e) {
        if (code) {
            *code = e.code();
        }
        return e.detail();
    }
    return "<no error>";
}

PilotDescription local_pilot() {
    PilotDescription d;
    d.name = "p";
    d.backend_kind = BackendKind::Local;
    d.nodes = 1;
    d.cores_per_node = 4;
    d.walltime_s = 60;
    return d;
}

TaskEvent make_event(K k) {
    switch (k) {
    case K::Schedule:
        return TaskEvent::schedule("p1");
    case K::Start:
        return TaskEvent::start();
    case K::Complete:
        return TaskEvent::complete({});
    case K::Fail:
        return TaskEvent::fail("boom");
    case K::Cancel:
        return TaskEvent::cancel();
    case K::Requeue:
        return TaskEvent::requeue();
    case K::Reject:
        return TaskEvent::reject("NoFeasiblePilot");
    }
    return TaskEvent::start();
}

const std::vector<TaskState> kStates{TaskState::New,  TaskState::Scheduled, TaskState::Running,
                                     TaskState::Done, TaskState::Failed,    TaskState::Canceled};
const std::vector<K> kEvents{K::Schedule, K::Start,   K::Complete, K::Fail,
                             K::Cancel,   K::Requeue, K::Reject};

// Reference transition relation, written out by hand.
std::optional<TaskState> expected(TaskState s, K e, bool retry_left) {
    using S = TaskState;
    if (s == S::New && e == K::Schedule) return S::Scheduled;
    if (s == S::New && e == K::Cancel) return S::Canceled;
    if (s == S::New && e == K::Reject) return S::Failed;
    if (s == S::Scheduled && e == K::Start) return S::Running;
    if (s == S::Scheduled && e == K::Cancel) return S::Canceled;
    if (s == S::Scheduled && e == K::Requeue) return S::New;
    if (s == S::Running && e == K::Complete) return S::Done;
    if (s == S::Running && e == K::Fail) return retry_left ? S::New : S::Failed;
    return std::nullopt;
}

TaskRecord record_in(TaskState s, std::uint32_t attempt, std::uint32_t max_retries) {
    auto d = TaskDescription::zero_compute("t");
    d.max_retries = max_retries;
    TaskRecord r = make_record(d, 1.0);
    r.state = s;
    r.attempt = attempt;
    if (s != TaskState::New && s != TaskState::Canceled) {
        r.assigned_pilot = "p0";
    }
    return r;
}

} // namespace

TEST_CASE("pilot description validation") {
    CHECK(validate_pilot_description(local_pilot()) == local_pilot());
    auto d = local_pilot();
    d.nodes = 0;
    ErrorCode code{};
    CHECK(error_text([&] { validate_pilot_description(d); }, &code) == "nodes");
    CHECK(code == ErrorCode::Validation);
    d = local_pilot();
    d.qpu_qubits = 8;
    CHECK(error_text([&] { validate_pilot_description(d); }) == "qpu_qubits only for qpu_sim");
    d = local_pilot();
    d.walltime_s = 0;
    CHECK(error_text([&] { validate_pilot_description(d); }) == "walltime_s");
    d = local_pilot();
    d.backend_kind = BackendKind::QpuSim;
    d.gpus_per_node = 1;
    CHECK(error_text([&] { validate_pilot_description(d); }) ==
          "gpus_per_node must be 0 for qpu_sim");
    d = local_pilot();
    d.queue_model.jitter_s = -1;
    CHECK(error_text([&] { validate_pilot_description(d); }) == "queue_model");
}

TEST_CASE("task description validation") {
    CHECK_NOTHROW(validate_task_description(TaskDescription::zero_compute("a")));
    auto bad = TaskDescription::classical("b", "noop");
    bad.requires_cores = 0;
    CHECK(error_text([&] { validate_task_description(bad); }) == "requires_cores");

    QuantumPayload p;
    p.circuit = qsim::random_circuit(5, 2, 1);
    auto q = TaskDescription::quantum("c", p);
    CHECK(q.requires_qubits == 5);
    q.requires_qubits = 4;
    CHECK(error_text([&] { validate_task_description(q); }).rfind("qubit mismatch", 0) == 0);

    auto z = TaskDescription::zero_compute("d");
    z.requires_qubits = 2;
    CHECK(error_text([&] { validate_task_description(z); }) ==
          "requires_qubits only for quantum_circuit");

    p.gradient = true;
    CHECK(error_text([&] { validate_task_description(TaskDescription::quantum("e", p)); }) !=
          "<no error>");
}

TEST_CASE("transition table matches the reference relation exhaustively") {
    for (auto s : kStates) {
        for (auto e : kEvents) {
            for (std::uint32_t attempt = 0; attempt < 3; ++attempt) {
                for (std::uint32_t max_retries = 0; max_retries < 3; ++max_retries) {
                    const auto rec = record_in(s, attempt, max_retries);
                    const auto want = expected(s, e, attempt < max_retries);
                    CAPTURE(to_string(s));
                    CAPTURE(to_string(e));
                    if (!want) {
                        ErrorCode code{};
                        error_text([&] { transition(rec, make_event(e), 2.0); }, &code);
                        CHECK(code == ErrorCode::IllegalTransition);
                        continue;
                    }
                    const auto out = transition(rec, make_event(e), 2.0);
                    CHECK(out.state == *want);
                    CHECK(out.attempt == attempt + (e == K::Fail ? 1 : 0));
                    const bool has_pilot = out.assigned_pilot.has_value();
                    switch (out.state) {
                    case TaskState::New:
                    case TaskState::Canceled:
                        CHECK_FALSE(has_pilot);
                        break;
                    case TaskState::Failed:
                        CHECK(has_pilot == (e == K::Fail));
                        break;
                    default:
                        CHECK(has_pilot);
                    }
                }
            }
        }
    }
}

TEST_CASE("spec examples for transition") {
    auto r = make_record(TaskDescription::zero_compute("t"), 0.5);
    auto s = transition(r, TaskEvent::schedule("p1"), 1.0);
    CHECK(s.state == TaskState::Scheduled);
    CHECK(s.assigned_pilot == "p1");
    CHECK(s.schedule_s == 1.0);

    auto running = transition(s, TaskEvent::start(), 2.0);
    ErrorCode code{};
    error_text([&] { transition(running, TaskEvent::cancel(), 3.0); }, &code);
    CHECK(code == ErrorCode::IllegalTransition);

    auto d = TaskDescription::zero_compute("u");
    d.max_retries = 1;
    auto retry = transition(
        transition(transition(make_record(d, 0), TaskEvent::schedule("p"), 0), TaskEvent::start(), 0),
        TaskEvent::fail("x"), 0);
    CHECK(retry.state == TaskState::New);
    CHECK(retry.attempt == 1);
    CHECK(retry.error == "x");
}

TEST_CASE("random event sequences stay on the transition graph") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 2000; ++trial) {
        auto d = TaskDescription::zero_compute("t" + std::to_string(trial));
        d.max_retries = static_cast<std::uint32_t>(rng() % 3);
        double now = 10.0;
        TaskRecord r = make_record(d, now);
        int terminals = 0;
        for (int step = 0; step < 30; ++step) {
            const K e = kEvents[rng() % kEvents.size()];
            // the clock may even jitter backwards; stamps must not
            now += std::uniform_real_distribution<double>(-0.5, 1.0)(rng);
            const auto want = expected(r.state, e, r.attempt < r.description.max_retries);
            if (!want) {
                CHECK_THROWS_AS(transition(r, make_event(e), now), Error);
                continue;
            }
            const auto next = transition(r, make_event(e), now);
            REQUIRE(next.state == *want);
            const std::optional<double> stamps[] = {next.submit_s, next.schedule_s, next.start_s,
                                                    next.end_s};
            double prev = -1e300;
            for (const auto &ts : stamps) {
                if (ts) {
                    CHECK(*ts >= prev);
                    prev = *ts;
                }
            }
            if (is_terminal(next.state)) {
                ++terminals;
            }
            r = next;
        }
        CHECK(terminals <= 1);
        if (is_terminal(r.state)) {
            for (auto e : kEvents) {
                CHECK_THROWS_AS(transition(r, make_event(e), now), Error);
            }
        }
    }
}

TEST_CASE("JSON round trips") {
    auto pd = local_pilot();
    pd.backend_kind = BackendKind::QpuSim;
    pd.qpu_qubits = 7;
    pd.queue_model = {5.0, 2.0, 0.2};
    pd.seed = 0xFFFFFFFFFFFFFFFFULL;
    CHECK(nlohmann::json(pd).get<PilotDescription>() == pd);

    QuantumPayload p;
    p.circuit = qsim::sel_circuit(2, 1, qsim::random_angles(6, 1));
    p.shots = 100;
    p.observables = {qsim::PauliObservable({{0.5, "ZX"}, {-1, "YY"}})};
    p.seed = 9;
    auto q = TaskDescription::quantum("q", p);
    q.target_pilot = "alpha";
    q.max_retries = 2;
    const nlohmann::json qj = q;
    CHECK(qj["target"] == "pilot:alpha");
    CHECK(qj.get<TaskDescription>() == q);

    auto c = TaskDescription::classical("c", "sleep", {{"seconds", 0.5}});
    CHECK(nlohmann::json(c).get<TaskDescription>() == c);
    auto z = TaskDescription::zero_compute("z");
    CHECK(nlohmann::json(z)["target"] == "any");
    CHECK(nlohmann::json(z).get<TaskDescription>() == z);

    auto rec = make_record(q, 1.0);
    rec = transition(rec, TaskEvent::schedule("alpha"), 2.0);
    rec = transition(rec, TaskEvent::start(), 3.0);
    TaskResult res;
    res.expectations = {0.25};
    res.counts = {{"01", 60}, {"10", 40}};
    res.gradient = {0.1, -0.2};
    res.data = {{"k", 1}};
    res.exec_s = 0.5;
    rec = transition(rec, TaskEvent::complete(res), 4.0);
    const nlohmann::json rj = rec;
    CHECK(rj["timestamps"]["end"] == 4.0);
    CHECK(rj.get<TaskRecord>() == rec);
    auto fresh = make_record(z, 0.0);
    CHECK(nlohmann::json(fresh)["timestamps"]["start"].is_null());
    CHECK(nlohmann::json(fresh).get<TaskRecord>() == fresh);

    EventRecord ev{1.5, EntityKind::Pilot, "p1", "pilot_created", {{"total_cores", "8"}}};
    CHECK(nlohmann::json(ev).get<EventRecord>() == ev);
}

TEST_CASE("enum strings") {
    CHECK(to_string(BackendKind::BatchSim) == "batch_sim");
    CHECK(to_string(TaskKind::QuantumCircuit) == "quantum_circuit");
    CHECK(to_string(TaskState::Canceled) == "CANCELED");
    CHECK(default_queue_model(BackendKind::BatchSim).base_delay_s == 37.0);
    CHECK(default_queue_model(BackendKind::Local).base_delay_s == 0.0);
}
