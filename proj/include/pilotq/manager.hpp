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
 * Workload layer: owns the pilot set and places pending tasks on feasible
 * pilots (cores, GPUs, qubits, affinity), least-loaded first.
 */
#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "pilotq/agent.hpp"
#include "pilotq/backends.hpp"
#include "pilotq/clock.hpp"
#include "pilotq/event_log.hpp"
#include "pilotq/functions.hpp"
#include "pilotq/model.hpp"

namespace pilotq {

struct ManagerOptions {
    std::shared_ptr<Clock> clock;
    std::shared_ptr<EventLog> log;
    std::shared_ptr<BackendRegistry> backends;
    std::shared_ptr<FunctionRegistry> functions;
    std::uint64_t memory_cap{qsim::kDefaultMemoryCapBytes};
    /// Schedule on submit, completion and pilot changes. When false, only
    /// explicit schedule_pending() calls place tasks.
    bool auto_schedule{true};
    /// Max queued+running tasks handed to one pilot at a time; 0 = no limit.
    std::size_t dispatch_window{0};

    /// Steady clock, fresh registry with built-ins, in-memory log.
    static ManagerOptions defaults();
};

struct Assignment {
    std::string task_id;
    std::string pilot;
    bool operator==(const Assignment &) const = default;
};

struct WaitResult {
    std::map<std::string, TaskRecord> records;
    /// False when the timeout hit before every task was terminal.
    bool complete{true};
};

struct CancelResult {
    TaskRecord record;
    /// False when the task was already running or terminal.
    bool canceled{false};
};

class PilotManager {
  public:
    explicit PilotManager(ManagerOptions options);
    ~PilotManager();

    PilotManager(const PilotManager &) = delete;
    PilotManager &operator=(const PilotManager &) = delete;

    /// Provisions, starts an agent with `workers` (0 = total cores) and
    /// registers the pilot.
    std::string create_pilot(const PilotDescription &desc, std::size_t workers = 0);

    /// Shuts the agent down. Without draining, its queued tasks go back to
    /// pending instead of being canceled.
    AgentMetrics remove_pilot(const std::string &name, bool drain);

    std::string submit_task(const TaskDescription &desc);

    /// One FIFO pass over pending tasks.
    std::vector<Assignment> schedule_pending();

    WaitResult wait(const std::vector<std::string> &ids, double timeout_s);
    WaitResult wait_all(double timeout_s);

    CancelResult cancel(const std::string &task_id);

    [[nodiscard]] TaskRecord record(const std::string &task_id) const;
    [[nodiscard]] std::vector<std::string> pilot_names() const;
    [[nodiscard]] std::optional<AgentMetrics> pilot_metrics(const std::string &name) const;

    /// Throws NoFeasiblePilot unless some configured pilot could run a task
    /// with these requirements.
    void require_feasible(const TaskDescription &desc) const;

    /// {"pilots": [...], "pending": n, "counts": {...}, "tasks_total": n,
    ///  "uptime_s": t}
    [[nodiscard]] nlohmann::json status() const;

    [[nodiscard]] const std::shared_ptr<EventLog> &log() const noexcept { return opts_.log; }
    [[nodiscard]] const std::shared_ptr<Clock> &clock() const noexcept { return opts_.clock; }
    [[nodiscard]] const std::shared_ptr<FunctionRegistry> &functions() const noexcept {
        return opts_.functions;
    }

  private:
    struct Capacity {
        BackendKind backend_kind{BackendKind::Local};
        std::uint32_t cores{0};
        std::uint32_t gpus{0};
        std::uint32_t qpu_qubits{0};
        std::uint32_t qubits{0};
        bool fits(const TaskDescription &d) const noexcept {
            return d.requires_cores <= cores && d.requires_gpus <= gpus &&
                   d.requires_qubits <= qubits;
        }
    };

    struct Pilot {
        Capacity capacity;
        std::unique_ptr<PilotAgent> agent;
        std::size_t outstanding{0};
    };

    enum class Location { Pending, Agent, Completed };

    std::vector<Assignment> schedule_locked();
    void on_task_started(const TaskRecord &record);
    void on_task_finished(const std::string &pilot, const TaskRecord &record);
    void emit_task(const std::string &id, const char *event, Attrs attrs = {});
    [[nodiscard]] bool all_terminal_locked(const std::vector<std::string> &ids) const;

    ManagerOptions opts_;
    double started_at_{0.0};

    mutable std::mutex mu_;
    std::condition_variable changed_;
    std::map<std::string, Pilot> pilots_;
    std::map<std::string, Capacity> configured_;
    std::deque<std::string> pending_;
    std::map<std::string, TaskRecord> records_;
    std::map<std::string, Location> location_;
    bool closing_{false};
};

} // namespace pilotq
