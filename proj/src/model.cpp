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

#include "pilotq/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "pilotq/error.hpp"

namespace pilotq {

namespace {

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N> &table,
                         E value) noexcept {
    for (const auto &[k, v] : table) {
        if (k == value) {
            return v;
        }
    }
    return "?";
}

template <typename E, std::size_t N>
E parse_of(const std::array<std::pair<E, std::string_view>, N> &table,
           std::string_view s, const char *what) {
    for (const auto &[k, v] : table) {
        if (v == s) {
            return k;
        }
    }
    fail(ErrorCode::Validation,
         std::string("unknown ") + what + " '" + std::string(s) + "'");
}

constexpr std::array<std::pair<BackendKind, std::string_view>, 3> kBackendNames{{
    {BackendKind::Local, "local"},
    {BackendKind::BatchSim, "batch_sim"},
    {BackendKind::QpuSim, "qpu_sim"},
}};

constexpr std::array<std::pair<TaskKind, std::string_view>, 3> kTaskKindNames{{
    {TaskKind::ZeroCompute, "zero_compute"},
    {TaskKind::ClassicalFn, "classical_fn"},
    {TaskKind::QuantumCircuit, "quantum_circuit"},
}};

constexpr std::array<std::pair<TaskState, std::string_view>, 6> kStateNames{{
    {TaskState::New, "NEW"},
    {TaskState::Scheduled, "SCHEDULED"},
    {TaskState::Running, "RUNNING"},
    {TaskState::Done, "DONE"},
    {TaskState::Failed, "FAILED"},
    {TaskState::Canceled, "CANCELED"},
}};

constexpr std::array<std::pair<EntityKind, std::string_view>, 3> kEntityNames{{
    {EntityKind::Task, "task"},
    {EntityKind::Pilot, "pilot"},
    {EntityKind::Manager, "manager"},
}};

bool finite_non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

} // namespace

std::string_view to_string(BackendKind kind) noexcept {
    return name_of(kBackendNames, kind);
}
std::string_view to_string(TaskKind kind) noexcept {
    return name_of(kTaskKindNames, kind);
}
std::string_view to_string(TaskState state) noexcept {
    return name_of(kStateNames, state);
}
std::string_view to_string(EntityKind kind) noexcept {
    return name_of(kEntityNames, kind);
}
BackendKind parse_backend_kind(std::string_view s) {
    return parse_of(kBackendNames, s, "backend_kind");
}
TaskKind parse_task_kind(std::string_view s) {
    return parse_of(kTaskKindNames, s, "task kind");
}
TaskState parse_task_state(std::string_view s) {
    return parse_of(kStateNames, s, "task state");
}
EntityKind parse_entity_kind(std::string_view s) {
    return parse_of(kEntityNames, s, "entity");
}

std::string_view to_string(TaskEvent::Kind kind) noexcept {
    switch (kind) {
    case TaskEvent::Kind::Schedule: return "schedule";
    case TaskEvent::Kind::Start: return "start";
    case TaskEvent::Kind::Complete: return "complete";
    case TaskEvent::Kind::Fail: return "fail";
    case TaskEvent::Kind::Cancel: return "cancel";
    case TaskEvent::Kind::Requeue: return "requeue";
    case TaskEvent::Kind::Reject: return "reject";
    }
    return "?";
}

bool is_terminal(TaskState state) noexcept {
    return state == TaskState::Done || state == TaskState::Failed ||
           state == TaskState::Canceled;
}

QueueModel default_queue_model(BackendKind kind) {
    switch (kind) {
    case BackendKind::BatchSim: return {kBatchSetupDelayS, 0.0, 0.0};
    case BackendKind::Local:
    case BackendKind::QpuSim: break;
    }
    return {};
}

TaskDescription TaskDescription::zero_compute(std::string id) {
    TaskDescription d;
    d.task_id = std::move(id);
    d.kind = TaskKind::ZeroCompute;
    return d;
}

TaskDescription TaskDescription::classical(std::string id, std::string function,
                                           nlohmann::json args) {
    TaskDescription d;
    d.task_id = std::move(id);
    d.kind = TaskKind::ClassicalFn;
    d.payload = ClassicalPayload{std::move(function), std::move(args)};
    return d;
}

TaskDescription TaskDescription::quantum(std::string id, QuantumPayload payload) {
    TaskDescription d;
    d.task_id = std::move(id);
    d.kind = TaskKind::QuantumCircuit;
    d.requires_qubits = static_cast<std::uint32_t>(payload.circuit.num_qubits);
    d.payload = std::move(payload);
    return d;
}

PilotDescription validate_pilot_description(const PilotDescription &desc) {
    require(!desc.name.empty(), ErrorCode::Validation, "name");
    require(desc.nodes >= 1, ErrorCode::Validation, "nodes");
    require(desc.cores_per_node >= 1, ErrorCode::Validation, "cores_per_node");
    require(desc.qpu_qubits == 0 || desc.backend_kind == BackendKind::QpuSim,
            ErrorCode::Validation, "qpu_qubits only for qpu_sim");
    require(desc.gpus_per_node == 0 || desc.backend_kind != BackendKind::QpuSim,
            ErrorCode::Validation, "gpus_per_node must be 0 for qpu_sim");
    require(std::isfinite(desc.walltime_s) && desc.walltime_s > 0.0,
            ErrorCode::Validation, "walltime_s");
    const auto &q = desc.queue_model;
    require(finite_non_negative(q.base_delay_s) &&
                finite_non_negative(q.jitter_s) &&
                finite_non_negative(q.per_task_latency_s),
            ErrorCode::Validation, "queue_model");
    return desc;
}

TaskDescription validate_task_description(const TaskDescription &desc) {
    require(!desc.task_id.empty(), ErrorCode::Validation, "task_id");
    require(desc.requires_cores >= 1, ErrorCode::Validation, "requires_cores");
    switch (desc.kind) {
    case TaskKind::ZeroCompute:
        require(std::holds_alternative<std::monostate>(desc.payload),
                ErrorCode::Validation, "zero_compute task carries a payload");
        require(desc.requires_qubits == 0, ErrorCode::Validation,
                "requires_qubits only for quantum_circuit");
        break;
    case TaskKind::ClassicalFn: {
        const auto *p = std::get_if<ClassicalPayload>(&desc.payload);
        require(p != nullptr && !p->function.empty(), ErrorCode::Validation,
                "classical_fn needs a function name");
        require(desc.requires_qubits == 0, ErrorCode::Validation,
                "requires_qubits only for quantum_circuit");
        break;
    }
    case TaskKind::QuantumCircuit: {
        const auto *p = std::get_if<QuantumPayload>(&desc.payload);
        require(p != nullptr, ErrorCode::Validation,
                "quantum_circuit needs a circuit payload");
        qsim::validate(p->circuit);
        require(desc.requires_qubits == p->circuit.num_qubits,
                ErrorCode::Validation,
                "qubit mismatch: requires_qubits=" +
                    std::to_string(desc.requires_qubits) + " but circuit has " +
                    std::to_string(p->circuit.num_qubits));
        for (const auto &o : p->observables) {
            require(o.num_qubits() == p->circuit.num_qubits,
                    ErrorCode::Validation, "observable width mismatch");
        }
        require(!p->gradient || !p->observables.empty(), ErrorCode::Validation,
                "gradient requested without an observable");
        require(!p->gradient || p->shots == 0, ErrorCode::Validation,
                "gradient requires exact mode (shots = 0)");
        break;
    }
    }
    return desc;
}

TaskRecord make_record(TaskDescription desc, double now) {
    TaskRecord r;
    r.description = std::move(desc);
    r.submit_s = now;
    return r;
}

namespace {

[[noreturn]] void illegal(const TaskRecord &r, const TaskEvent &e) {
    fail(ErrorCode::IllegalTransition,
         "task '" + r.id() + "': " + std::string(to_string(e.kind)) +
             " not allowed from " + std::string(to_string(r.state)));
}

double latest_stamp(const TaskRecord &r) {
    double t = -INFINITY;
    for (const auto &s : {r.submit_s, r.schedule_s, r.start_s, r.end_s}) {
        if (s) {
            t = std::max(t, *s);
        }
    }
    return t;
}

} // namespace

TaskRecord transition(const TaskRecord &record, const TaskEvent &event, double now) {
    TaskRecord r = record;
    const double ts = std::max(now, latest_stamp(record));
    using K = TaskEvent::Kind;
    switch (event.kind) {
    case K::Schedule:
        if (r.state != TaskState::New || event.pilot.empty()) {
            illegal(record, event);
        }
        r.state = TaskState::Scheduled;
        r.assigned_pilot = event.pilot;
        r.schedule_s = ts;
        break;
    case K::Start:
        if (r.state != TaskState::Scheduled) {
            illegal(record, event);
        }
        r.state = TaskState::Running;
        r.start_s = ts;
        break;
    case K::Complete:
        if (r.state != TaskState::Running) {
            illegal(record, event);
        }
        r.state = TaskState::Done;
        r.result = event.result;
        r.error.reset();
        r.end_s = ts;
        break;
    case K::Fail:
        if (r.state != TaskState::Running) {
            illegal(record, event);
        }
        r.error = event.error;
        if (r.attempt < r.description.max_retries) {
            // Fresh attempt: back to the scheduling queue on any pilot.
            r.state = TaskState::New;
            r.assigned_pilot.reset();
            r.schedule_s.reset();
            r.start_s.reset();
        } else {
            r.state = TaskState::Failed;
            r.end_s = ts;
        }
        ++r.attempt;
        break;
    case K::Cancel:
        if (r.state != TaskState::New && r.state != TaskState::Scheduled) {
            illegal(record, event);
        }
        r.state = TaskState::Canceled;
        r.assigned_pilot.reset();
        r.end_s = ts;
        break;
    case K::Requeue:
        if (r.state != TaskState::Scheduled) {
            illegal(record, event);
        }
        r.state = TaskState::New;
        r.assigned_pilot.reset();
        r.schedule_s.reset();
        break;
    case K::Reject:
        if (r.state != TaskState::New) {
            illegal(record, event);
        }
        r.state = TaskState::Failed;
        r.error = event.error;
        r.end_s = ts;
        break;
    }
    return r;
}

// ---- JSON -----------------------------------------------------------------

void to_json(nlohmann::json &j, const QueueModel &v) {
    j = nlohmann::json{{"base_delay_s", v.base_delay_s},
                       {"jitter_s", v.jitter_s},
                       {"per_task_latency_s", v.per_task_latency_s}};
}

void from_json(const nlohmann::json &j, QueueModel &v) {
    v.base_delay_s = j.value("base_delay_s", 0.0);
    v.jitter_s = j.value("jitter_s", 0.0);
    v.per_task_latency_s = j.value("per_task_latency_s", 0.0);
}

void to_json(nlohmann::json &j, const PilotDescription &v) {
    j = nlohmann::json{{"name", v.name},
                       {"backend_kind", to_string(v.backend_kind)},
                       {"nodes", v.nodes},
                       {"cores_per_node", v.cores_per_node},
                       {"gpus_per_node", v.gpus_per_node},
                       {"qpu_qubits", v.qpu_qubits},
                       {"walltime_s", v.walltime_s},
                       {"queue_model", v.queue_model},
                       {"seed", v.seed}};
}

void from_json(const nlohmann::json &j, PilotDescription &v) {
    v.name = j.at("name").get<std::string>();
    v.backend_kind = parse_backend_kind(j.value("backend_kind", "local"));
    v.nodes = j.value("nodes", 1U);
    v.cores_per_node = j.value("cores_per_node", 1U);
    v.gpus_per_node = j.value("gpus_per_node", 0U);
    v.qpu_qubits = j.value("qpu_qubits", 0U);
    v.walltime_s = j.value("walltime_s", 3600.0);
    v.queue_model = j.contains("queue_model")
                        ? j["queue_model"].get<QueueModel>()
                        : default_queue_model(v.backend_kind);
    v.seed = j.value("seed", std::uint64_t{0});
}

void to_json(nlohmann::json &j, const QuantumPayload &v) {
    j = nlohmann::json{{"circuit", v.circuit},
                       {"shots", v.shots},
                       {"observables", v.observables},
                       {"gradient", v.gradient},
                       {"seed", v.seed}};
}

void from_json(const nlohmann::json &j, QuantumPayload &v) {
    v.circuit = j.at("circuit").get<qsim::Circuit>();
    v.shots = j.value("shots", std::size_t{0});
    v.observables = j.value("observables", std::vector<qsim::PauliObservable>{});
    v.gradient = j.value("gradient", false);
    v.seed = j.value("seed", std::uint64_t{0});
}

void to_json(nlohmann::json &j, const TaskDescription &v) {
    j = nlohmann::json{{"task_id", v.task_id},
                       {"kind", to_string(v.kind)},
                       {"requires_cores", v.requires_cores},
                       {"requires_gpus", v.requires_gpus},
                       {"requires_qubits", v.requires_qubits},
                       {"target", v.target_pilot ? "pilot:" + *v.target_pilot
                                                 : std::string("any")},
                       {"max_retries", v.max_retries}};
    if (const auto *c = std::get_if<ClassicalPayload>(&v.payload)) {
        j["payload"] = {{"function", c->function}, {"args", c->args}};
    } else if (const auto *q = std::get_if<QuantumPayload>(&v.payload)) {
        j["payload"] = *q;
    } else {
        j["payload"] = nlohmann::json::object();
    }
}

void from_json(const nlohmann::json &j, TaskDescription &v) {
    v.task_id = j.at("task_id").get<std::string>();
    v.kind = parse_task_kind(j.value("kind", "zero_compute"));
    const nlohmann::json payload = j.value("payload", nlohmann::json::object());
    switch (v.kind) {
    case TaskKind::ZeroCompute: v.payload = std::monostate{}; break;
    case TaskKind::ClassicalFn:
        v.payload = ClassicalPayload{
            payload.at("function").get<std::string>(),
            payload.value("args", nlohmann::json::object())};
        break;
    case TaskKind::QuantumCircuit: v.payload = payload.get<QuantumPayload>(); break;
    }
    v.requires_cores = j.value("requires_cores", 1U);
    v.requires_gpus = j.value("requires_gpus", 0U);
    if (j.contains("requires_qubits")) {
        v.requires_qubits = j["requires_qubits"].get<std::uint32_t>();
    } else if (const auto *q = std::get_if<QuantumPayload>(&v.payload)) {
        v.requires_qubits = static_cast<std::uint32_t>(q->circuit.num_qubits);
    } else {
        v.requires_qubits = 0;
    }
    const std::string target = j.value("target", "any");
    if (target == "any") {
        v.target_pilot.reset();
    } else if (target.rfind("pilot:", 0) == 0 && target.size() > 6) {
        v.target_pilot = target.substr(6);
    } else {
        fail(ErrorCode::Validation, "target must be 'any' or 'pilot:<name>'");
    }
    v.max_retries = j.value("max_retries", 0U);
}

void to_json(nlohmann::json &j, const TaskResult &v) {
    j = nlohmann::json{{"expectations", v.expectations},
                       {"counts", v.counts},
                       {"gradient", v.gradient},
                       {"data", v.data},
                       {"queue_wait_s", v.queue_wait_s},
                       {"exec_s", v.exec_s}};
}

void from_json(const nlohmann::json &j, TaskResult &v) {
    v.expectations = j.value("expectations", std::vector<double>{});
    v.counts = j.value("counts", qsim::Counts{});
    v.gradient = j.value("gradient", std::vector<double>{});
    v.data = j.contains("data") ? j["data"] : nlohmann::json();
    v.queue_wait_s = j.value("queue_wait_s", 0.0);
    v.exec_s = j.value("exec_s", 0.0);
}

namespace {
template <typename T>
void put_optional(nlohmann::json &j, const char *key, const std::optional<T> &v) {
    j[key] = v ? nlohmann::json(*v) : nlohmann::json();
}
template <typename T>
std::optional<T> get_optional(const nlohmann::json &j, const char *key) {
    if (!j.contains(key) || j[key].is_null()) {
        return std::nullopt;
    }
    return j[key].get<T>();
}
} // namespace

void to_json(nlohmann::json &j, const TaskRecord &v) {
    j = nlohmann::json{{"description", v.description},
                       {"state", to_string(v.state)},
                       {"attempt", v.attempt}};
    put_optional(j, "assigned_pilot", v.assigned_pilot);
    nlohmann::json ts;
    put_optional(ts, "submit", v.submit_s);
    put_optional(ts, "schedule", v.schedule_s);
    put_optional(ts, "start", v.start_s);
    put_optional(ts, "end", v.end_s);
    j["timestamps"] = ts;
    put_optional(j, "result", v.result);
    put_optional(j, "error", v.error);
}

void from_json(const nlohmann::json &j, TaskRecord &v) {
    v.description = j.at("description").get<TaskDescription>();
    v.state = parse_task_state(j.at("state").get<std::string>());
    v.attempt = j.value("attempt", 0U);
    v.assigned_pilot = get_optional<std::string>(j, "assigned_pilot");
    const nlohmann::json ts = j.value("timestamps", nlohmann::json::object());
    v.submit_s = get_optional<double>(ts, "submit");
    v.schedule_s = get_optional<double>(ts, "schedule");
    v.start_s = get_optional<double>(ts, "start");
    v.end_s = get_optional<double>(ts, "end");
    v.result = get_optional<TaskResult>(j, "result");
    v.error = get_optional<std::string>(j, "error");
}

void to_json(nlohmann::json &j, const EventRecord &v) {
    j = nlohmann::json{{"ts_s", v.ts_s},
                       {"entity", to_string(v.entity)},
                       {"entity_id", v.entity_id},
                       {"event", v.event},
                       {"attrs", v.attrs}};
}

void from_json(const nlohmann::json &j, EventRecord &v) {
    v.ts_s = j.at("ts_s").get<double>();
    v.entity = parse_entity_kind(j.at("entity").get<std::string>());
    v.entity_id = j.at("entity_id").get<std::string>();
    v.event = j.at("event").get<std::string>();
    v.attrs = j.value("attrs", Attrs{});
}

} // namespace pilotq
