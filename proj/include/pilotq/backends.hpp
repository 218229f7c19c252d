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
 * Resource layer: simulated backends that grant and reclaim pilot
 * allocations. `local` grants immediately, `batch_sim` stands in for a batch
 * queue, and `qpu_sim` is an ideal cloud QPU with queue and latency models.
 */
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "pilotq/clock.hpp"
#include "pilotq/model.hpp"
#include "pilotq/qsim/circuit.hpp"
#include "pilotq/qsim/observable.hpp"
#include "pilotq/qsim/simulator.hpp"

namespace pilotq {

struct PilotAllocation {
    std::uint64_t allocation_id{0};
    std::string pilot_name;
    BackendKind backend_kind{BackendKind::Local};
    std::uint32_t total_cores{1};
    std::uint32_t total_gpus{0};
    std::uint32_t qpu_qubits{0};
    double granted_at_s{0.0};
    double expires_at_s{0.0};
    QueueModel queue_model;
    std::uint64_t seed{0};

    bool operator==(const PilotAllocation &) const = default;
};

struct QpuExecutionReport {
    qsim::Counts counts;
    /// Filled in exact mode (shots == 0), one entry per observable.
    std::vector<double> expectations;
    double queue_wait_s{0.0};
    double exec_s{0.0};
};

/// Optional backend-wide limits on concurrently granted capacity.
struct CapacityCeiling {
    std::optional<std::uint64_t> cores;
    std::optional<std::uint64_t> gpus;
    std::optional<std::uint64_t> qpu_qubits;
};

class ResourceBackend {
  public:
    struct Usage {
        std::uint64_t cores{0};
        std::uint64_t gpus{0};
        std::uint64_t qpu_qubits{0};
        std::size_t allocations{0};
    };

    ResourceBackend(BackendKind kind, std::shared_ptr<Clock> clock,
                    CapacityCeiling ceiling = {});

    [[nodiscard]] BackendKind kind() const noexcept { return kind_; }
    [[nodiscard]] const CapacityCeiling &ceiling() const noexcept { return ceiling_; }
    [[nodiscard]] Usage in_use() const;

    /// Grants the full requested capacity. Non-local backends grant after
    /// base_delay +/- uniform(jitter), sampled from desc.seed.
    PilotAllocation provision(const PilotDescription &desc);

    /// Returns capacity to the backend. Throws DoubleRelease for an
    /// allocation that is not currently held.
    void release(const PilotAllocation &alloc);

    /// Ideal QPU execution. Blocks on the clock for the sampled queue wait
    /// and the per-task latency. With shots == 0 the report carries exact
    /// expectations instead of counts.
    QpuExecutionReport qpu_execute(const qsim::Circuit &circuit, std::size_t shots,
                                   const PilotAllocation &alloc, std::uint64_t seed,
                                   const std::vector<qsim::PauliObservable> &observables = {},
                                   std::uint64_t memory_cap = qsim::kDefaultMemoryCapBytes);

  private:
    BackendKind kind_;
    std::shared_ptr<Clock> clock_;
    CapacityCeiling ceiling_;
    mutable std::mutex mu_;
    Usage usage_;
    std::uint64_t next_id_{1};
    std::map<std::uint64_t, PilotAllocation> held_;
};

/// Backends keyed by kind, one instance each, sharing a clock.
class BackendRegistry {
  public:
    explicit BackendRegistry(std::shared_ptr<Clock> clock,
                             const std::map<BackendKind, CapacityCeiling> &ceilings = {});

    /// Reads ceilings from `{"backends": {"batch_sim": {"max_cores": 64}}}`.
    static std::shared_ptr<BackendRegistry> from_config(std::shared_ptr<Clock> clock,
                                                        const nlohmann::json &config);

    ResourceBackend &get(BackendKind kind);
    ResourceBackend &get(std::string_view kind);
    [[nodiscard]] const std::shared_ptr<Clock> &clock() const noexcept { return clock_; }

  private:
    std::shared_ptr<Clock> clock_;
    std::map<BackendKind, std::unique_ptr<ResourceBackend>> backends_;
};

void to_json(nlohmann::json &j, const PilotAllocation &v);
void from_json(const nlohmann::json &j, PilotAllocation &v);

} // namespace pilotq
