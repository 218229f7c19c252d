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

#include "pilotq/agent.hpp"

#include <chrono>
#include <future>

#include "pilotq/error.hpp"

namespace pilotq {

void to_json(nlohmann::json &j, const AgentMetrics &m) {
    j = nlohmann::json{{"tasks_done", m.tasks_done},
                       {"tasks_failed", m.tasks_failed},
                       {"tasks_canceled", m.tasks_canceled},
                       {"busy_cores", m.busy_cores},
                       {"busy_gpus", m.busy_gpus},
                       {"queue_depth", m.queue_depth},
                       {"running", m.running},
                       {"total_exec_s", m.total_exec_s},
                       {"agent_overhead_s", m.agent_overhead_s}};
}

void from_json(const nlohmann::json &j, AgentMetrics &m) {
    m.tasks_done = j.value("tasks_done", std::uint64_t{0});
    m.tasks_failed = j.value("tasks_failed", std::uint64_t{0});
    m.tasks_canceled = j.value("tasks_canceled", std::uint64_t{0});
    m.busy_cores = j.value("busy_cores", 0U);
    m.busy_gpus = j.value("busy_gpus", 0U);
    m.queue_depth = j.value("queue_depth", std::size_t{0});
    m.running = j.value("running", std::size_t{0});
    m.total_exec_s = j.value("total_exec_s", 0.0);
    m.agent_overhead_s = j.value("agent_overhead_s", 0.0);
}

std::uint32_t qubit_capacity(const PilotAllocation &alloc, std::uint64_t memory_cap) {
    if (alloc.backend_kind == BackendKind::QpuSim) {
        return alloc.qpu_qubits;
    }
    return static_cast<std::uint32_t>(qsim::max_qubits(memory_cap));
}

std::unique_ptr<PilotAgent> PilotAgent::start(PilotAllocation alloc, std::size_t workers,
                                              AgentContext ctx) {
    require(workers >= 1 && workers <= alloc.total_cores,
            ErrorCode::WorkerOversubscription,
            std::to_string(workers) + " workers on " +
                std::to_string(alloc.total_cores) + " cores");
    std::unique_ptr<PilotAgent> agent(new PilotAgent(std::move(alloc), workers, std::move(ctx)));
    for (std::size_t i = 0; i < agent->workers_; ++i) {
        agent->threads_.emplace_back([a = agent.get()] { a->worker_loop(); });
    }
    return agent;
}

PilotAgent::PilotAgent(PilotAllocation alloc, std::size_t workers, AgentContext ctx)
    : alloc_(std::move(alloc)), workers_(workers), ctx_(std::move(ctx)),
      qubit_capacity_(pilotq::qubit_capacity(alloc_, ctx_.memory_cap)) {}

PilotAgent::~PilotAgent() {
    try {
        shutdown(false);
    } catch (...) {
        // Releasing twice during teardown is not worth propagating.
    }
}

bool PilotAgent::fits(const TaskDescription &desc) const noexcept {
    return desc.requires_cores <= alloc_.total_cores &&
           desc.requires_gpus <= alloc_.total_gpus &&
           desc.requires_qubits <= qubit_capacity_;
}

std::optional<double> PilotAgent::ready_at() const {
    std::lock_guard lock(mu_);
    return ready_at_;
}

void PilotAgent::emit(const TaskRecord &r, const char *event, Attrs attrs) {
    if (ctx_.log) {
        attrs["pilot"] = name();
        ctx_.log->emit(EntityKind::Task, r.id(), event, std::move(attrs));
    }
}

void PilotAgent::assign(TaskRecord record, Completion done, Completion started) {
    require(record.state == TaskState::Scheduled && record.assigned_pilot == name(),
            ErrorCode::IllegalTransition,
            "task '" + record.id() + "' is not scheduled on pilot '" + name() + "'");
    {
        std::lock_guard lock(mu_);
        require(!stopping_, ErrorCode::AgentStopped,
                "pilot '" + name() + "' no longer accepts tasks");
        queue_.push_back(Item{std::move(record), std::move(done), std::move(started)});
        metrics_.queue_depth = queue_.size();
    }
    cv_.notify_all();
}

TaskRecord PilotAgent::execute_task(TaskRecord record) {
    auto promise = std::make_shared<std::promise<TaskRecord>>();
    auto future = promise->get_future();
    assign(std::move(record), [promise](const TaskRecord &r) { promise->set_value(r); });
    return future.get();
}

std::optional<TaskRecord> PilotAgent::withdraw(const std::string &task_id) {
    std::lock_guard lock(mu_);
    for (auto it = queue_.begin(); it != queue_.end(); ++it) {
        if (it->record.id() == task_id) {
            TaskRecord r = std::move(it->record);
            queue_.erase(it);
            metrics_.queue_depth = queue_.size();
            cv_.notify_all();
            return r;
        }
    }
    return std::nullopt;
}

std::vector<TaskRecord> PilotAgent::withdraw_all() {
    std::lock_guard lock(mu_);
    std::vector<TaskRecord> out;
    for (auto &item : queue_) {
        out.push_back(std::move(item.record));
    }
    queue_.clear();
    metrics_.queue_depth = 0;
    return out;
}

AgentMetrics PilotAgent::metrics() const {
    std::lock_guard lock(mu_);
    return metrics_;
}

bool PilotAgent::head_runnable() const {
    if (queue_.empty()) {
        return false;
    }
    const auto &d = queue_.front().record.description;
    if (!fits(d)) {
        return true; // fails immediately without holding slots
    }
    return metrics_.busy_cores + d.requires_cores <= alloc_.total_cores &&
           metrics_.busy_gpus + d.requires_gpus <= alloc_.total_gpus;
}

void PilotAgent::worker_loop() {
    ctx_.clock->sleep_until(alloc_.granted_at_s);
    {
        std::lock_guard lock(mu_);
        if (!ready_at_) {
            ready_at_ = std::max(ctx_.clock->now(), alloc_.granted_at_s);
            if (ctx_.log) {
                ctx_.log->emit(EntityKind::Pilot, name(), "agent_ready",
                               {{"ready_at_s", std::to_string(*ready_at_)}});
            }
        }
    }

    for (;;) {
        Item item;
        bool holds_slots = false;
        {
            std::unique_lock lock(mu_);
            cv_.wait(lock, [&] { return (stopping_ && queue_.empty()) || head_runnable(); });
            if (queue_.empty()) {
                return;
            }
            item = std::move(queue_.front());
            queue_.pop_front();
            metrics_.queue_depth = queue_.size();
            const auto &d = item.record.description;
            if (fits(d)) {
                metrics_.busy_cores += d.requires_cores;
                metrics_.busy_gpus += d.requires_gpus;
                holds_slots = true;
            }
            ++metrics_.running;
        }

        TaskRecord final_record = run(std::move(item.record), item.started);

        {
            std::lock_guard lock(mu_);
            const auto &d = final_record.description;
            if (holds_slots) {
                metrics_.busy_cores -= d.requires_cores;
                metrics_.busy_gpus -= d.requires_gpus;
            }
            --metrics_.running;
            if (final_record.state == TaskState::Done) {
                ++metrics_.tasks_done;
            } else {
                ++metrics_.tasks_failed;
            }
            if (final_record.start_s && final_record.schedule_s) {
                metrics_.agent_overhead_s += *final_record.start_s - *final_record.schedule_s;
            }
            if (final_record.result) {
                metrics_.total_exec_s += final_record.result->exec_s;
            }
        }
        cv_.notify_all();
        if (item.done) {
            item.done(final_record);
        }
    }
}

TaskRecord PilotAgent::run(TaskRecord record, const Completion &started) {
    record = transition(record, TaskEvent::start(), ctx_.clock->now());
    emit(record, "task_started");
    if (started) {
        started(record);
    }
    std::string error;
    TaskResult result;
    try {
        const auto &d = record.description;
        require(fits(d), ErrorCode::QubitCapacityExceeded,
                "task does not fit pilot '" + name() + "' (capacity bug)");
        require(*record.start_s <= alloc_.expires_at_s, ErrorCode::WalltimeExpired,
                "pilot '" + name() + "' walltime expired");
        result = run_payload(d);
    } catch (const std::exception &e) {
        error = e.what();
    }

    const double now = ctx_.clock->now();
    if (error.empty()) {
        record = transition(record, TaskEvent::complete(std::move(result)), now);
        emit(record, "task_done");
        return record;
    }
    record = transition(record, TaskEvent::fail(error), now);
    if (record.state == TaskState::New) {
        emit(record, "task_retry",
             {{"error", error}, {"attempt", std::to_string(record.attempt)}});
    } else {
        emit(record, "task_failed", {{"error", error}});
    }
    return record;
}

TaskResult PilotAgent::run_payload(const TaskDescription &desc) {
    const auto t0 = std::chrono::steady_clock::now();
    TaskResult result;
    switch (desc.kind) {
    case TaskKind::ZeroCompute: break;
    case TaskKind::ClassicalFn: {
        const auto &p = std::get<ClassicalPayload>(desc.payload);
        require(ctx_.functions != nullptr, ErrorCode::UnknownFunction,
                "agent has no function registry");
        result.data = ctx_.functions->call(p.function, p.args);
        break;
    }
    case TaskKind::QuantumCircuit:
        result = run_quantum(std::get<QuantumPayload>(desc.payload));
        break;
    }
    if (desc.kind != TaskKind::QuantumCircuit ||
        alloc_.backend_kind != BackendKind::QpuSim) {
        result.exec_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    return result;
}

TaskResult PilotAgent::run_quantum(const QuantumPayload &p) {
    TaskResult result;
    if (alloc_.backend_kind == BackendKind::QpuSim) {
        require(!p.gradient, ErrorCode::Validation,
                "adjoint gradients need a simulator pilot, not a QPU");
        auto report = ctx_.backends->get(BackendKind::QpuSim)
                          .qpu_execute(p.circuit, p.shots, alloc_, p.seed,
                                       p.observables, ctx_.memory_cap);
        result.counts = std::move(report.counts);
        result.expectations = std::move(report.expectations);
        if (p.shots > 0) {
            for (const auto &o : p.observables) {
                result.expectations.push_back(qsim::sample_expectation(result.counts, o));
            }
        }
        result.queue_wait_s = report.queue_wait_s;
        result.exec_s = report.exec_s;
        return result;
    }

    if (p.gradient) {
        auto vg = qsim::value_and_gradient(p.circuit, p.observables.front(), ctx_.memory_cap);
        result.expectations.push_back(vg.value);
        result.gradient = std::move(vg.gradient);
        if (p.observables.size() > 1) {
            const auto state = qsim::run_circuit(p.circuit, ctx_.memory_cap);
            for (std::size_t i = 1; i < p.observables.size(); ++i) {
                result.expectations.push_back(qsim::expectation(state, p.observables[i]));
            }
        }
        return result;
    }

    const auto state = qsim::run_circuit(p.circuit, ctx_.memory_cap);
    if (p.shots > 0) {
        result.counts = qsim::sample(state, p.shots, p.seed);
        for (const auto &o : p.observables) {
            result.expectations.push_back(qsim::sample_expectation(result.counts, o));
        }
    } else {
        for (const auto &o : p.observables) {
            result.expectations.push_back(qsim::expectation(state, o));
        }
    }
    return result;
}

AgentMetrics PilotAgent::shutdown(bool drain) {
    std::lock_guard guard(shutdown_mu_);
    if (stopped_) {
        return final_metrics_;
    }
    std::deque<Item> canceled;
    {
        std::lock_guard lock(mu_);
        stopping_ = true;
        if (!drain) {
            canceled.swap(queue_);
            metrics_.queue_depth = 0;
        }
    }
    cv_.notify_all();
    for (auto &item : canceled) {
        TaskRecord r = transition(item.record, TaskEvent::cancel(), ctx_.clock->now());
        emit(r, "task_canceled");
        {
            std::lock_guard lock(mu_);
            ++metrics_.tasks_canceled;
        }
        if (item.done) {
            item.done(r);
        }
    }
    for (auto &t : threads_) {
        if (t.joinable()) {
            t.join();
        }
    }
    stopped_ = true;
    final_metrics_ = metrics();
    if (ctx_.backends) {
        ctx_.backends->get(alloc_.backend_kind).release(alloc_);
    }
    if (ctx_.log) {
        ctx_.log->emit(EntityKind::Pilot, name(), "agent_stopped",
                       {{"tasks_done", std::to_string(final_metrics_.tasks_done)},
                        {"tasks_failed", std::to_string(final_metrics_.tasks_failed)},
                        {"tasks_canceled", std::to_string(final_metrics_.tasks_canceled)}});
    }
    return final_metrics_;
}

} // namespace pilotq
