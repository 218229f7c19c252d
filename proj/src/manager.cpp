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

#include "pilotq/manager.hpp"

#include <algorithm>

#include "pilotq/error.hpp"

namespace pilotq {

ManagerOptions ManagerOptions::defaults() {
    ManagerOptions o;
    o.clock = std::make_shared<SteadyClock>();
    o.log = std::make_shared<EventLog>(o.clock);
    o.backends = std::make_shared<BackendRegistry>(o.clock);
    o.functions = FunctionRegistry::with_builtins();
    return o;
}

PilotManager::PilotManager(ManagerOptions options) : opts_(std::move(options)) {
    if (!opts_.clock) {
        opts_.clock = std::make_shared<SteadyClock>();
    }
    if (!opts_.log) {
        opts_.log = std::make_shared<EventLog>(opts_.clock);
    }
    if (!opts_.backends) {
        opts_.backends = std::make_shared<BackendRegistry>(opts_.clock);
    }
    if (!opts_.functions) {
        opts_.functions = FunctionRegistry::with_builtins();
    }
    started_at_ = opts_.clock->now();
}

PilotManager::~PilotManager() {
    std::vector<std::unique_ptr<PilotAgent>> agents;
    {
        std::lock_guard lock(mu_);
        closing_ = true;
        for (auto &[name, p] : pilots_) {
            agents.push_back(std::move(p.agent));
        }
        pilots_.clear();
    }
    for (auto &a : agents) {
        try {
            a->shutdown(false);
        } catch (...) {
        }
    }
    opts_.log->flush();
}

void PilotManager::emit_task(const std::string &id, const char *event, Attrs attrs) {
    opts_.log->emit(EntityKind::Task, id, event, std::move(attrs));
}

std::string PilotManager::create_pilot(const PilotDescription &desc, std::size_t workers) {
    validate_pilot_description(desc);
    std::lock_guard lock(mu_);
    require(!pilots_.count(desc.name), ErrorCode::DuplicatePilotName,
            "pilot '" + desc.name + "' already exists");

    auto &backend = opts_.backends->get(desc.backend_kind);
    PilotAllocation alloc = backend.provision(desc);
    const std::size_t nworkers = workers == 0 ? alloc.total_cores : workers;
    AgentContext ctx{opts_.clock, opts_.log, opts_.backends, opts_.functions,
                     opts_.memory_cap};
    std::unique_ptr<PilotAgent> agent;
    try {
        agent = PilotAgent::start(alloc, nworkers, ctx);
    } catch (...) {
        backend.release(alloc);
        throw;
    }

    Capacity cap{alloc.backend_kind, alloc.total_cores, alloc.total_gpus, alloc.qpu_qubits,
                 agent->qubit_capacity()};
    pilots_[desc.name] = Pilot{cap, std::move(agent), 0};
    configured_[desc.name] = cap;
    opts_.log->emit(EntityKind::Pilot, desc.name, "pilot_created",
                    {{"backend_kind", std::string(to_string(alloc.backend_kind))},
                     {"total_cores", std::to_string(alloc.total_cores)},
                     {"total_gpus", std::to_string(alloc.total_gpus)},
                     {"qpu_qubits", std::to_string(alloc.qpu_qubits)},
                     {"qubit_capacity", std::to_string(cap.qubits)},
                     {"workers", std::to_string(nworkers)},
                     {"granted_at_s", std::to_string(alloc.granted_at_s)},
                     {"expires_at_s", std::to_string(alloc.expires_at_s)}});
    if (opts_.auto_schedule) {
        schedule_locked();
    }
    return desc.name;
}

AgentMetrics PilotManager::remove_pilot(const std::string &name, bool drain) {
    std::unique_ptr<PilotAgent> agent;
    {
        std::lock_guard lock(mu_);
        auto it = pilots_.find(name);
        require(it != pilots_.end(), ErrorCode::UnknownPilot,
                "no pilot named '" + name + "'");
        agent = std::move(it->second.agent);
        pilots_.erase(it);
        if (!drain) {
            auto withdrawn = agent->withdraw_all();
            // Put them back ahead of newer submissions, keeping their order.
            for (auto r = withdrawn.rbegin(); r != withdrawn.rend(); ++r) {
                TaskRecord rec = transition(*r, TaskEvent::requeue(), opts_.clock->now());
                emit_task(rec.id(), "task_requeued", {{"from", name}});
                pending_.push_front(rec.id());
                location_[rec.id()] = Location::Pending;
                records_[rec.id()] = std::move(rec);
            }
        }
    }

    AgentMetrics metrics = agent->shutdown(drain);

    std::lock_guard lock(mu_);
    opts_.log->emit(EntityKind::Pilot, name, "pilot_removed",
                    {{"drain", drain ? "true" : "false"}});
    if (opts_.auto_schedule && !closing_) {
        schedule_locked();
    }
    changed_.notify_all();
    return metrics;
}

std::string PilotManager::submit_task(const TaskDescription &desc) {
    validate_task_description(desc);
    std::lock_guard lock(mu_);
    require(!records_.count(desc.task_id), ErrorCode::DuplicateTaskId,
            "task '" + desc.task_id + "' already submitted");
    TaskRecord rec = make_record(desc, opts_.clock->now());
    emit_task(desc.task_id, "task_submitted",
              {{"kind", std::string(to_string(desc.kind))},
               {"cores", std::to_string(desc.requires_cores)},
               {"gpus", std::to_string(desc.requires_gpus)},
               {"qubits", std::to_string(desc.requires_qubits)}});
    records_.emplace(desc.task_id, std::move(rec));
    location_[desc.task_id] = Location::Pending;
    pending_.push_back(desc.task_id);
    if (opts_.auto_schedule) {
        schedule_locked();
    }
    return desc.task_id;
}

std::vector<Assignment> PilotManager::schedule_pending() {
    std::lock_guard lock(mu_);
    return schedule_locked();
}

std::vector<Assignment> PilotManager::schedule_locked() {
    std::vector<Assignment> out;
    if (pending_.empty()) {
        return out;
    }
    std::deque<std::string> keep;
    while (!pending_.empty()) {
        const std::string id = std::move(pending_.front());
        pending_.pop_front();
        TaskRecord &rec = records_.at(id);
        const TaskDescription &d = rec.description;

        Pilot *best = nullptr;
        const std::string *best_name = nullptr;
        for (auto &[pname, p] : pilots_) {
            if (d.target_pilot && *d.target_pilot != pname) {
                continue;
            }
            if (!p.capacity.fits(d)) {
                continue;
            }
            if (opts_.dispatch_window != 0 && p.outstanding >= opts_.dispatch_window) {
                continue;
            }
            // pilots_ is ordered by name, so strict '<' keeps the
            // lexicographically smallest among equally loaded pilots.
            if (best == nullptr || p.outstanding < best->outstanding) {
                best = &p;
                best_name = &pname;
            }
        }

        if (best != nullptr) {
            rec = transition(rec, TaskEvent::schedule(*best_name), opts_.clock->now());
            ++best->outstanding;
            location_[id] = Location::Agent;
            Attrs attrs{{"pilot", *best_name},
                        {"cores", std::to_string(d.requires_cores)},
                        {"gpus", std::to_string(d.requires_gpus)},
                        {"qubits", std::to_string(d.requires_qubits)}};
            if (d.target_pilot) {
                attrs["target"] = *d.target_pilot;
            }
            emit_task(id, "task_scheduled", std::move(attrs));
            const std::string pilot = *best_name;
            best->agent->assign(
                rec,
                [this, pilot](const TaskRecord &r) { on_task_finished(pilot, r); },
                [this](const TaskRecord &r) { on_task_started(r); });
            out.push_back({id, pilot});
            continue;
        }

        // Nothing live fits right now. Fail only if no configured pilot
        // could ever take it; an unknown affinity target keeps it waiting.
        bool waiting = configured_.empty();
        bool ever_feasible = false;
        if (d.target_pilot) {
            auto it = configured_.find(*d.target_pilot);
            if (it == configured_.end()) {
                waiting = true;
            } else {
                ever_feasible = it->second.fits(d);
            }
        } else {
            ever_feasible = std::any_of(configured_.begin(), configured_.end(),
                                        [&](const auto &kv) { return kv.second.fits(d); });
        }
        if (waiting || ever_feasible) {
            keep.push_back(id);
            continue;
        }
        rec = transition(rec, TaskEvent::reject("NoFeasiblePilot: no configured pilot "
                                                "satisfies the task's constraints"),
                         opts_.clock->now());
        location_[id] = Location::Completed;
        emit_task(id, "task_rejected", {{"error", *rec.error}});
        changed_.notify_all();
    }
    pending_.swap(keep);
    return out;
}

void PilotManager::on_task_started(const TaskRecord &record) {
    std::lock_guard lock(mu_);
    auto it = records_.find(record.id());
    if (it != records_.end() && it->second.state == TaskState::Scheduled &&
        location_[record.id()] == Location::Agent) {
        it->second = record;
    }
}

void PilotManager::on_task_finished(const std::string &pilot, const TaskRecord &record) {
    std::lock_guard lock(mu_);
    if (auto it = pilots_.find(pilot); it != pilots_.end() && it->second.outstanding > 0) {
        --it->second.outstanding;
    }
    records_[record.id()] = record;
    if (record.state == TaskState::New) {
        location_[record.id()] = Location::Pending;
        pending_.push_back(record.id());
    } else {
        location_[record.id()] = Location::Completed;
    }
    changed_.notify_all();
    if (opts_.auto_schedule && !closing_) {
        schedule_locked();
    }
}

bool PilotManager::all_terminal_locked(const std::vector<std::string> &ids) const {
    return std::all_of(ids.begin(), ids.end(),
                       [&](const std::string &id) { return is_terminal(records_.at(id).state); });
}

WaitResult PilotManager::wait(const std::vector<std::string> &ids, double timeout_s) {
    std::unique_lock lock(mu_);
    for (const auto &id : ids) {
        require(records_.count(id) > 0, ErrorCode::UnknownTaskId,
                "unknown task '" + id + "'");
    }
    // Terminal states are permanent, so a cursor over `ids` keeps each
    // wake-up cheap.
    std::size_t cursor = 0;
    auto done = [&] {
        while (cursor < ids.size() && is_terminal(records_.at(ids[cursor]).state)) {
            ++cursor;
        }
        return cursor == ids.size();
    };
    if (timeout_s > 0) {
        changed_.wait_for(lock, std::chrono::duration<double>(timeout_s), done);
    }
    WaitResult out;
    out.complete = done();
    for (const auto &id : ids) {
        out.records.emplace(id, records_.at(id));
    }
    return out;
}

WaitResult PilotManager::wait_all(double timeout_s) {
    std::vector<std::string> ids;
    {
        std::lock_guard lock(mu_);
        ids.reserve(records_.size());
        for (const auto &[id, r] : records_) {
            ids.push_back(id);
        }
    }
    return wait(ids, timeout_s);
}

CancelResult PilotManager::cancel(const std::string &task_id) {
    std::lock_guard lock(mu_);
    auto it = records_.find(task_id);
    require(it != records_.end(), ErrorCode::UnknownTaskId,
            "unknown task '" + task_id + "'");
    TaskRecord &rec = it->second;
    const double now = opts_.clock->now();

    if (rec.state == TaskState::New && location_[task_id] == Location::Pending) {
        pending_.erase(std::find(pending_.begin(), pending_.end(), task_id));
        rec = transition(rec, TaskEvent::cancel(), now);
        location_[task_id] = Location::Completed;
        emit_task(task_id, "task_canceled");
        changed_.notify_all();
        return {rec, true};
    }
    if (rec.state == TaskState::Scheduled && rec.assigned_pilot) {
        auto p = pilots_.find(*rec.assigned_pilot);
        if (p != pilots_.end()) {
            if (auto withdrawn = p->second.agent->withdraw(task_id)) {
                if (p->second.outstanding > 0) {
                    --p->second.outstanding;
                }
                rec = transition(*withdrawn, TaskEvent::cancel(), now);
                location_[task_id] = Location::Completed;
                emit_task(task_id, "task_canceled");
                changed_.notify_all();
                if (opts_.auto_schedule) {
                    schedule_locked();
                }
                return {rec, true};
            }
        }
    }
    return {rec, false};
}

TaskRecord PilotManager::record(const std::string &task_id) const {
    std::lock_guard lock(mu_);
    auto it = records_.find(task_id);
    require(it != records_.end(), ErrorCode::UnknownTaskId,
            "unknown task '" + task_id + "'");
    return it->second;
}

std::vector<std::string> PilotManager::pilot_names() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto &[name, p] : pilots_) {
        out.push_back(name);
    }
    return out;
}

std::optional<AgentMetrics> PilotManager::pilot_metrics(const std::string &name) const {
    std::lock_guard lock(mu_);
    auto it = pilots_.find(name);
    if (it == pilots_.end()) {
        return std::nullopt;
    }
    return it->second.agent->metrics();
}

void PilotManager::require_feasible(const TaskDescription &desc) const {
    std::lock_guard lock(mu_);
    const bool ok = std::any_of(configured_.begin(), configured_.end(), [&](const auto &kv) {
        return (!desc.target_pilot || *desc.target_pilot == kv.first) && kv.second.fits(desc);
    });
    require(ok, ErrorCode::NoFeasiblePilot,
            "no configured pilot offers " + std::to_string(desc.requires_cores) +
                " cores, " + std::to_string(desc.requires_gpus) + " GPUs and " +
                std::to_string(desc.requires_qubits) + " qubits");
}

nlohmann::json PilotManager::status() const {
    std::lock_guard lock(mu_);
    nlohmann::json pilots = nlohmann::json::array();
    for (const auto &[name, p] : pilots_) {
        pilots.push_back({{"name", name},
                          {"backend_kind", to_string(p.capacity.backend_kind)},
                          {"total_cores", p.capacity.cores},
                          {"total_gpus", p.capacity.gpus},
                          {"qpu_qubits", p.capacity.qpu_qubits},
                          {"outstanding", p.outstanding}});
    }
    nlohmann::json counts = nlohmann::json::object();
    std::map<TaskState, std::uint64_t> tally;
    for (const auto &[id, r] : records_) {
        ++tally[r.state];
    }
    for (auto s : {TaskState::New, TaskState::Scheduled, TaskState::Running, TaskState::Done,
                   TaskState::Failed, TaskState::Canceled}) {
        counts[std::string(to_string(s))] = tally[s];
    }
    return {{"pilots", pilots},
            {"pending", pending_.size()},
            {"counts", counts},
            {"tasks_total", records_.size()},
            {"uptime_s", opts_.clock->now() - started_at_}};
}

} // namespace pilotq
