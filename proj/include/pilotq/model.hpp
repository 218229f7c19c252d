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

/**
 * @file
 * Domain types shared by every layer: pilot and task descriptions, task
 * records with their lifecycle state machine, and JSON codecs.
 */
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "pilotq/qsim/circuit.hpp"
#include "pilotq/qsim/observable.hpp"
#include "pilotq/qsim/simulator.hpp"

namespace pilotq {

enum class BackendKind { Local, BatchSim, QpuSim };
enum class TaskKind { ZeroCompute, ClassicalFn, QuantumCircuit };
enum class TaskState { New, Scheduled, Running, Done, Failed, Canceled };

std::string_view to_string(BackendKind kind) noexcept;
std::string_view to_string(TaskKind kind) noexcept;
std::string_view to_string(TaskState state) noexcept;
BackendKind parse_backend_kind(std::string_view s);
TaskKind parse_task_kind(std::string_view s);
TaskState parse_task_state(std::string_view s);

bool is_terminal(TaskState state) noexcept;

struct QueueModel {
    double base_delay_s{0.0};
    /// Half-width of the uniform jitter around base_delay_s.
    double jitter_s{0.0};
    double per_task_latency_s{0.0};

    bool operator==(const QueueModel &) const = default;
};

/// Pilot setup time on the batch scheduler stand-in.
inline constexpr double kBatchSetupDelayS = 37.0;

/// Queue model a backend uses when the description does not override it.
QueueModel default_queue_model(BackendKind kind);

struct PilotDescription {
    std::string name;
    BackendKind backend_kind{BackendKind::Local};
    std::uint32_t nodes{1};
    std::uint32_t cores_per_node{1};
    std::uint32_t gpus_per_node{0};
    /// 0 means no QPU.
    std::uint32_t qpu_qubits{0};
    double walltime_s{3600.0};
    QueueModel queue_model;
    std::uint64_t seed{0};

    bool operator==(const PilotDescription &) const = default;
};

struct ClassicalPayload {
    std::string function;
    nlohmann::json args;

    bool operator==(const ClassicalPayload &) const = default;
};

struct QuantumPayload {
    qsim::Circuit circuit;
    /// 0 selects exact state-vector evaluation.
    std::size_t shots{0};
    /// One expectation value is produced per entry.
    std::vector<qsim::PauliObservable> observables;
    /// Also return the adjoint gradient of observables[0].
    bool gradient{false};
    std::uint64_t seed{0};

    bool operator==(const QuantumPayload &) const = default;
};

using TaskPayload = std::variant<std::monostate, ClassicalPayload, QuantumPayload>;

struct TaskDescription {
    std::string task_id;
    TaskKind kind{TaskKind::ZeroCompute};
    TaskPayload payload;
    std::uint32_t requires_cores{1};
    std::uint32_t requires_gpus{0};
    std::uint32_t requires_qubits{0};
    /// Empty means any pilot.
    std::optional<std::string> target_pilot;
    std::uint32_t max_retries{0};

    static TaskDescription zero_compute(std::string id);
    static TaskDescription classical(std::string id, std::string function,
                                     nlohmann::json args = nlohmann::json::object());
    /// requires_qubits is taken from the circuit.
    static TaskDescription quantum(std::string id, QuantumPayload payload);

    bool operator==(const TaskDescription &) const = default;
};

struct TaskResult {
    std::vector<double> expectations;
    qsim::Counts counts;
    std::vector<double> gradient;
    nlohmann::json data;
    double queue_wait_s{0.0};
    double exec_s{0.0};

    bool operator==(const TaskResult &) const = default;
};

struct TaskRecord {
    TaskDescription description;
    TaskState state{TaskState::New};
    std::optional<std::string> assigned_pilot;
    std::optional<double> submit_s;
    std::optional<double> schedule_s;
    std::optional<double> start_s;
    std::optional<double> end_s;
    std::uint32_t attempt{0};
    std::optional<TaskResult> result;
    std::optional<std::string> error;

    [[nodiscard]] const std::string &id() const noexcept {
        return description.task_id;
    }

    bool operator==(const TaskRecord &) const = default;
};

/// Inputs to the lifecycle state machine.
struct TaskEvent {
    enum class Kind {
        Schedule, ///< NEW -> SCHEDULED on `pilot`
        Start,    ///< SCHEDULED -> RUNNING
        Complete, ///< RUNNING -> DONE with `result`
        Fail,     ///< RUNNING -> NEW (retry left) or FAILED
        Cancel,   ///< NEW/SCHEDULED -> CANCELED
        Requeue,  ///< SCHEDULED -> NEW when a pilot is withdrawn
        Reject,   ///< NEW -> FAILED when no configured pilot can ever fit
    };
    Kind kind;
    std::string pilot;
    TaskResult result;
    std::string error;

    static TaskEvent schedule(std::string pilot) {
        return {Kind::Schedule, std::move(pilot), {}, {}};
    }
    static TaskEvent start() { return {Kind::Start, {}, {}, {}}; }
    static TaskEvent complete(TaskResult r) {
        return {Kind::Complete, {}, std::move(r), {}};
    }
    static TaskEvent fail(std::string err) {
        return {Kind::Fail, {}, {}, std::move(err)};
    }
    static TaskEvent cancel() { return {Kind::Cancel, {}, {}, {}}; }
    static TaskEvent requeue() { return {Kind::Requeue, {}, {}, {}}; }
    static TaskEvent reject(std::string err) {
        return {Kind::Reject, {}, {}, std::move(err)};
    }
};

std::string_view to_string(TaskEvent::Kind kind) noexcept;

PilotDescription validate_pilot_description(const PilotDescription &desc);
TaskDescription validate_task_description(const TaskDescription &desc);

/// Pure lifecycle step. Throws IllegalTransition when `event` is not allowed
/// from `record.state`. Timestamps are taken from `now` but never move
/// backwards relative to earlier stamps on the record.
TaskRecord transition(const TaskRecord &record, const TaskEvent &event, double now);

/// Fresh NEW record stamped with its submit time.
TaskRecord make_record(TaskDescription desc, double now);

enum class EntityKind { Task, Pilot, Manager };
std::string_view to_string(EntityKind kind) noexcept;
EntityKind parse_entity_kind(std::string_view s);

using Attrs = std::map<std::string, std::string>;

struct EventRecord {
    double ts_s{0.0};
    EntityKind entity{EntityKind::Manager};
    std::string entity_id;
    std::string event;
    Attrs attrs;

    bool operator==(const EventRecord &) const = default;
};

void to_json(nlohmann::json &j, const QueueModel &v);
void from_json(const nlohmann::json &j, QueueModel &v);
void to_json(nlohmann::json &j, const PilotDescription &v);
void from_json(const nlohmann::json &j, PilotDescription &v);
void to_json(nlohmann::json &j, const QuantumPayload &v);
void from_json(const nlohmann::json &j, QuantumPayload &v);
void to_json(nlohmann::json &j, const TaskDescription &v);
void from_json(const nlohmann::json &j, TaskDescription &v);
void to_json(nlohmann::json &j, const TaskResult &v);
void from_json(const nlohmann::json &j, TaskResult &v);
void to_json(nlohmann::json &j, const TaskRecord &v);
void from_json(const nlohmann::json &j, TaskRecord &v);
void to_json(nlohmann::json &j, const EventRecord &v);
void from_json(const nlohmann::json &j, EventRecord &v);

} // namespace pilotq
