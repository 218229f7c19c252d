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
#include <cmath>
#include <set>
#include <thread>

#include "pilotq/backends.hpp"
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

PilotDescription desc(BackendKind kind, std::uint32_t nodes = 1, std::uint32_t cores = 4) {
    PilotDescription d;
    d.name = "p";
    d.backend_kind = kind;
    d.nodes = nodes;
    d.cores_per_node = cores;
    d.walltime_s = 100;
    d.queue_model = default_queue_model(kind);
    return d;
}

} // namespace

TEST_CASE("local grants immediately with full capacity") {
    auto clock = std::make_shared<ManualClock>(5.0);
    ResourceBackend local(BackendKind::Local, clock);
    auto d = desc(BackendKind::Local, 2, 4);
    d.gpus_per_node = 2;
    const auto a = local.provision(d);
    CHECK(a.total_cores == 8);
    CHECK(a.total_gpus == 4);
    CHECK(a.granted_at_s == 5.0);
    CHECK(a.expires_at_s == 105.0);
    CHECK(local.in_use().cores == 8);
}

TEST_CASE("batch_sim delay") {
    auto clock = std::make_shared<ManualClock>(0.0);
    ResourceBackend batch(BackendKind::BatchSim, clock);
    auto d = desc(BackendKind::BatchSim);
    d.queue_model = {37.0, 0.0, 0.0};
    CHECK(batch.provision(d).granted_at_s == 37.0);
    CHECK(default_queue_model(BackendKind::BatchSim).base_delay_s == 37.0);
}

TEST_CASE("qpu_sim delay is jittered and reproducible") {
    auto clock = std::make_shared<ManualClock>(0.0);
    ResourceBackend qpu(BackendKind::QpuSim, clock);
    auto d = desc(BackendKind::QpuSim);
    d.qpu_qubits = 5;
    d.queue_model = {5.0, 2.0, 0.0};
    std::set<double> seen;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        d.seed = seed;
        const double a = qpu.provision(d).granted_at_s;
        const double b = qpu.provision(d).granted_at_s;
        CHECK(a == b);
        CHECK(a >= 3.0);
        CHECK(a <= 7.0);
        seen.insert(a);
    }
    CHECK(seen.size() > 40);
}

TEST_CASE("kind mismatch is rejected") {
    auto clock = std::make_shared<ManualClock>();
    ResourceBackend local(BackendKind::Local, clock);
    CHECK(code_of([&] { local.provision(desc(BackendKind::BatchSim)); }) == ErrorCode::Validation);
}

TEST_CASE("release and capacity ceilings") {
    auto clock = std::make_shared<ManualClock>();
    CapacityCeiling ceiling;
    ceiling.cores = 4;
    ResourceBackend batch(BackendKind::BatchSim, clock, ceiling);
    auto d = desc(BackendKind::BatchSim, 1, 4);
    const auto a = batch.provision(d);
    CHECK(code_of([&] { batch.provision(d); }) == ErrorCode::Capacity);
    batch.release(a);
    CHECK(batch.in_use().cores == 0);
    CHECK(code_of([&] { batch.release(a); }) == ErrorCode::DoubleRelease);
    const auto b = batch.provision(d);
    CHECK(b.allocation_id != a.allocation_id);
    d.cores_per_node = 5;
    CHECK(code_of([&] { batch.provision(d); }) == ErrorCode::Capacity);
}

TEST_CASE("concurrent provisioning never exceeds the ceiling") {
    auto clock = std::make_shared<ManualClock>();
    CapacityCeiling ceiling;
    ceiling.cores = 10;
    ResourceBackend local(BackendKind::Local, clock, ceiling);
    std::atomic<int> granted{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&] {
            for (int i = 0; i < 50; ++i) {
                try {
                    auto a = local.provision(desc(BackendKind::Local, 1, 3));
                    CHECK(local.in_use().cores <= 10);
                    ++granted;
                    local.release(a);
                } catch (const Error &e) {
                    CHECK(e.code() == ErrorCode::Capacity);
                }
            }
        });
    }
    for (auto &t : threads) {
        t.join();
    }
    CHECK(granted > 0);
    CHECK(local.in_use().cores == 0);
}

TEST_CASE("qpu_execute") {
    auto clock = std::make_shared<ManualClock>();
    ResourceBackend qpu(BackendKind::QpuSim, clock);
    auto d = desc(BackendKind::QpuSim);
    d.qpu_qubits = 2;
    d.queue_model = {0.0, 0.0, 0.2};
    const auto a = qpu.provision(d);

    qsim::Circuit flip(1);
    flip.x(0);
    const auto r = qpu.qpu_execute(flip, 100, a, 1);
    CHECK(r.counts == qsim::Counts{{"1", 100}});
    CHECK(r.exec_s >= 0.2);
    CHECK(clock->now() >= 0.2);

    qsim::Circuit bell(2);
    bell.h(0).cnot(0, 1);
    const auto b = qpu.qpu_execute(bell, 4096, a, 7);
    std::uint64_t total = 0;
    for (const auto &[k, v] : b.counts) {
        CHECK((k == "00" || k == "11"));
        CHECK(k.size() == 2);
        total += v;
    }
    CHECK(total == 4096);
    CHECK(std::abs(double(b.counts.at("00")) - 2048) <= 4 * std::sqrt(4096 * 0.25));
    CHECK(qpu.qpu_execute(bell, 4096, a, 7).counts == b.counts);

    const auto exact =
        qpu.qpu_execute(bell, 0, a, 7, {qsim::PauliObservable::single("ZZ")});
    CHECK(exact.expectations.at(0) == doctest::Approx(1.0));

    CHECK(code_of([&] { qpu.qpu_execute(qsim::Circuit(3), 10, a, 1); }) ==
          ErrorCode::QubitCapacityExceeded);

    ResourceBackend local(BackendKind::Local, clock);
    const auto la = local.provision(desc(BackendKind::Local));
    CHECK(code_of([&] { qpu.qpu_execute(flip, 10, la, 1); }) == ErrorCode::QubitCapacityExceeded);
}

TEST_CASE("registry from config and allocation JSON") {
    auto clock = std::make_shared<ManualClock>();
    auto reg = BackendRegistry::from_config(
        clock, {{"backends", {{"batch_sim", {{"max_cores", 64}}}}}});
    CHECK(reg->get("batch_sim").ceiling().cores == 64u);
    CHECK_FALSE(reg->get(BackendKind::Local).ceiling().cores.has_value());
    CHECK(code_of([&] { reg->get("cloud"); }) == ErrorCode::Validation);

    const auto a = reg->get(BackendKind::Local).provision(desc(BackendKind::Local));
    CHECK(nlohmann::json(a).get<PilotAllocation>() == a);
}
