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
 * Task layer: the per-pilot agent. It owns a bounded worker pool on one
 * allocation and runs assigned tasks in FIFO order while tracking core and
 * GPU slots.
 */
#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "json.hpp"

#include "pilotq/backends.hpp"
#include "pilotq/clock.hpp"
#include "pilotq/event_log.hpp"
#include "pilotq/functions.hpp"
#include "pilotq/model.hpp"

namespace pilotq {

struct AgentMetrics {
    std::uint64_t tasks_done{0};
    std::uint64_t tasks_failed{0};
    std::uint64_t tasks_canceled{0};
    std::uint32_t busy_cores{0};
    std::uint32_t busy_gpus{0};
    std::size_t queue_depth{0};
    std::size_t running{0};
    double total_exec_s{0.0};
    /// Sum over started tasks of (start - schedule).
    double agent_overhead_s{0.0};

    bool operator==(const AgentMetrics &) const = default;
};

void to_json(nlohmann::json &j, const AgentMetrics &m);
void from_json(const nlohmann::json &j, AgentMetrics &m);

/// Everything an agent needs besides its allocation.
struct AgentContext {
    std::shared_ptr<Clock> clock;
    std::shared_ptr<EventLog> log;
    std::shared_ptr<BackendRegistry> backends;
    std::shared_ptr<const FunctionRegistry> functions;
    std::uint64_t memory_cap{qsim::kDefaultMemoryCapBytes};
};

/// Qubits a pilot can run: the QPU size for qpu_sim, otherwise the largest
/// circuit the in-process simulator fits under `memory_cap`.
std::uint32_t qubit_capacity(const PilotAllocation &alloc, std::uint64_t memory_cap);

class PilotAgent {
  public:
    using Completion = std::function<void(const TaskRecord &)>;

    /// Throws WorkerOversubscription unless 1 <= workers <= total_cores.
    static std::unique_ptr<PilotAgent> start(PilotAllocation alloc, std::size_t workers,
                                             AgentContext ctx);
    ~PilotAgent();

    PilotAgent(const PilotAgent &) = delete;
    PilotAgent &operator=(const PilotAgent &) = delete;

    [[nodiscard]] const PilotAllocation &allocation() const noexcept { return alloc_; }
    [[nodiscard]] const std::string &name() const noexcept { return alloc_.pilot_name; }
    [[nodiscard]] std::size_t workers() const noexcept { return workers_; }
    [[nodiscard]] std::uint32_t qubit_capacity() const noexcept { return qubit_capacity_; }
    /// Whether the task could ever run here, ignoring current load.
    [[nodiscard]] bool fits(const TaskDescription &desc) const noexcept;
    /// Clock time at which the agent became ready, once it has.
    [[nodiscard]] std::optional<double> ready_at() const;

    /// Queues a SCHEDULED task assigned to this pilot. `done` runs on a
    /// worker thread with the final record (terminal, or NEW for a retry).
    /// Throws AgentStopped after shutdown.
    /// `started`, when set, runs on the worker right after the RUNNING
    /// transition.
    void assign(TaskRecord record, Completion done, Completion started = {});

    /// Blocking form of assign().
    TaskRecord execute_task(TaskRecord record);

    /// Removes a still-queued task; nullopt if unknown or already running.
    std::optional<TaskRecord> withdraw(const std::string &task_id);
    std::vector<TaskRecord> withdraw_all();

    [[nodiscard]] AgentMetrics metrics() const;

    /// drain=true runs everything queued first; drain=false cancels the
    /// queue and waits only for running tasks. Releases the allocation.
    /// Repeated calls return the same final metrics.
    AgentMetrics shutdown(bool drain);

  private:
    struct Item {
        TaskRecord record;
        Completion done;
        Completion started;
    };

    PilotAgent(PilotAllocation alloc, std::size_t workers, AgentContext ctx);
    void worker_loop();
    [[nodiscard]] bool head_runnable() const;
    TaskRecord run(TaskRecord record, const Completion &started);
    TaskResult run_payload(const TaskDescription &desc);
    TaskResult run_quantum(const QuantumPayload &p);
    void emit(const TaskRecord &r, const char *event, Attrs attrs = {});

    PilotAllocation alloc_;
    std::size_t workers_;
    AgentContext ctx_;
    std::uint32_t qubit_capacity_;

    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<Item> queue_;
    AgentMetrics metrics_;
    bool stopping_{false};
    std::optional<double> ready_at_;

    std::mutex shutdown_mu_;
    bool stopped_{false};
    AgentMetrics final_metrics_;
    std::vector<std::thread> threads_;
};

} // namespace pilotq
