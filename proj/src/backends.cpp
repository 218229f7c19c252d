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

#include "pilotq/backends.hpp"

#include <chrono>
#include <random>

#include "pilotq/error.hpp"

namespace pilotq {

ResourceBackend::ResourceBackend(BackendKind kind, std::shared_ptr<Clock> clock,
                                 CapacityCeiling ceiling)
    : kind_(kind), clock_(std::move(clock)), ceiling_(ceiling) {}

ResourceBackend::Usage ResourceBackend::in_use() const {
    std::lock_guard lock(mu_);
    return usage_;
}

PilotAllocation ResourceBackend::provision(const PilotDescription &desc) {
    validate_pilot_description(desc);
    require(desc.backend_kind == kind_, ErrorCode::Validation,
            "pilot '" + desc.name + "' asks for " +
                std::string(to_string(desc.backend_kind)) + " but backend is " +
                std::string(to_string(kind_)));

    PilotAllocation alloc;
    alloc.pilot_name = desc.name;
    alloc.backend_kind = kind_;
    alloc.total_cores = desc.nodes * desc.cores_per_node;
    alloc.total_gpus = desc.nodes * desc.gpus_per_node;
    alloc.qpu_qubits = desc.qpu_qubits;
    alloc.queue_model = desc.queue_model;
    alloc.seed = desc.seed;

    double delay = 0.0;
    if (kind_ != BackendKind::Local) {
        const auto &q = desc.queue_model;
        delay = q.base_delay_s;
        if (q.jitter_s > 0.0) {
            std::mt19937_64 rng(desc.seed);
            std::uniform_real_distribution<double> jitter(-q.jitter_s, q.jitter_s);
            delay += jitter(rng);
        }
        delay = std::max(0.0, delay);
    }

    {
        std::lock_guard lock(mu_);
        auto over = [](const std::optional<std::uint64_t> &cap, std::uint64_t used,
                       std::uint64_t want) { return cap && used + want > *cap; };
        if (over(ceiling_.cores, usage_.cores, alloc.total_cores) ||
            over(ceiling_.gpus, usage_.gpus, alloc.total_gpus) ||
            over(ceiling_.qpu_qubits, usage_.qpu_qubits, alloc.qpu_qubits)) {
            fail(ErrorCode::Capacity,
                 "backend " + std::string(to_string(kind_)) +
                     " cannot grant pilot '" + desc.name + "' within its ceiling");
        }
        usage_.cores += alloc.total_cores;
        usage_.gpus += alloc.total_gpus;
        usage_.qpu_qubits += alloc.qpu_qubits;
        ++usage_.allocations;
        alloc.allocation_id = next_id_++;
        const double now = clock_->now();
        alloc.granted_at_s = now + delay;
        alloc.expires_at_s = alloc.granted_at_s + desc.walltime_s;
        held_.emplace(alloc.allocation_id, alloc);
    }
    return alloc;
}

void ResourceBackend::release(const PilotAllocation &alloc) {
    std::lock_guard lock(mu_);
    auto it = held_.find(alloc.allocation_id);
    require(it != held_.end(), ErrorCode::DoubleRelease,
            "allocation " + std::to_string(alloc.allocation_id) + " of pilot '" +
                alloc.pilot_name + "' is not held");
    usage_.cores -= it->second.total_cores;
    usage_.gpus -= it->second.total_gpus;
    usage_.qpu_qubits -= it->second.qpu_qubits;
    --usage_.allocations;
    held_.erase(it);
}

QpuExecutionReport ResourceBackend::qpu_execute(
    const qsim::Circuit &circuit, std::size_t shots, const PilotAllocation &alloc,
    std::uint64_t seed, const std::vector<qsim::PauliObservable> &observables,
    std::uint64_t memory_cap) {
    require(alloc.backend_kind == BackendKind::QpuSim && kind_ == BackendKind::QpuSim,
            ErrorCode::QubitCapacityExceeded, "allocation has no QPU");
    require(circuit.num_qubits <= alloc.qpu_qubits, ErrorCode::QubitCapacityExceeded,
            std::to_string(circuit.num_qubits) + "-qubit circuit on a " +
                std::to_string(alloc.qpu_qubits) + "-qubit QPU");

    QpuExecutionReport report;
    const auto &q = alloc.queue_model;
    if (q.jitter_s > 0.0) {
        std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
        report.queue_wait_s = std::uniform_real_distribution<double>(0.0, q.jitter_s)(rng);
    }
    clock_->sleep_for(report.queue_wait_s);

    const auto t0 = std::chrono::steady_clock::now();
    const qsim::StateVector state = qsim::run_circuit(circuit, memory_cap);
    if (shots > 0) {
        report.counts = qsim::sample(state, shots, seed);
    } else {
        for (const auto &o : observables) {
            report.expectations.push_back(qsim::expectation(state, o));
        }
    }
    const double sim_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    clock_->sleep_for(q.per_task_latency_s);
    report.exec_s = q.per_task_latency_s + sim_s;
    return report;
}

BackendRegistry::BackendRegistry(std::shared_ptr<Clock> clock,
                                 const std::map<BackendKind, CapacityCeiling> &ceilings)
    : clock_(std::move(clock)) {
    for (auto kind : {BackendKind::Local, BackendKind::BatchSim, BackendKind::QpuSim}) {
        auto it = ceilings.find(kind);
        backends_[kind] = std::make_unique<ResourceBackend>(
            kind, clock_, it == ceilings.end() ? CapacityCeiling{} : it->second);
    }
}

std::shared_ptr<BackendRegistry>
BackendRegistry::from_config(std::shared_ptr<Clock> clock, const nlohmann::json &config) {
    std::map<BackendKind, CapacityCeiling> ceilings;
    if (config.contains("backends")) {
        for (const auto &[name, cfg] : config["backends"].items()) {
            CapacityCeiling c;
            if (cfg.contains("max_cores")) {
                c.cores = cfg["max_cores"].get<std::uint64_t>();
            }
            if (cfg.contains("max_gpus")) {
                c.gpus = cfg["max_gpus"].get<std::uint64_t>();
            }
            if (cfg.contains("max_qpu_qubits")) {
                c.qpu_qubits = cfg["max_qpu_qubits"].get<std::uint64_t>();
            }
            ceilings[parse_backend_kind(name)] = c;
        }
    }
    return std::make_shared<BackendRegistry>(std::move(clock), ceilings);
}

ResourceBackend &BackendRegistry::get(BackendKind kind) { return *backends_.at(kind); }

ResourceBackend &BackendRegistry::get(std::string_view kind) {
    return get(parse_backend_kind(kind));
}

void to_json(nlohmann::json &j, const PilotAllocation &v) {
    j = nlohmann::json{{"allocation_id", v.allocation_id},
                       {"pilot_name", v.pilot_name},
                       {"backend_kind", to_string(v.backend_kind)},
                       {"total_cores", v.total_cores},
                       {"total_gpus", v.total_gpus},
                       {"qpu_qubits", v.qpu_qubits},
                       {"granted_at_s", v.granted_at_s},
                       {"expires_at_s", v.expires_at_s},
                       {"queue_model", v.queue_model},
                       {"seed", v.seed}};
}

void from_json(const nlohmann::json &j, PilotAllocation &v) {
    v.allocation_id = j.at("allocation_id").get<std::uint64_t>();
    v.pilot_name = j.at("pilot_name").get<std::string>();
    v.backend_kind = parse_backend_kind(j.at("backend_kind").get<std::string>());
    v.total_cores = j.at("total_cores").get<std::uint32_t>();
    v.total_gpus = j.at("total_gpus").get<std::uint32_t>();
    v.qpu_qubits = j.at("qpu_qubits").get<std::uint32_t>();
    v.granted_at_s = j.at("granted_at_s").get<double>();
    v.expires_at_s = j.at("expires_at_s").get<double>();
    v.queue_model = j.value("queue_model", QueueModel{});
    v.seed = j.value("seed", std::uint64_t{0});
}

} // namespace pilotq
