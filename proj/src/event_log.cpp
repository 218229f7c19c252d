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

#include "pilotq/event_log.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "pilotq/error.hpp"

namespace pilotq {

EventLog::EventLog(std::shared_ptr<const Clock> clock) : clock_(std::move(clock)) {}

EventLog::EventLog(std::shared_ptr<const Clock> clock,
                   const std::filesystem::path &jsonl)
    : clock_(std::move(clock)), sink_(jsonl, std::ios::out | std::ios::trunc) {
    require(sink_.good(), ErrorCode::Io, "cannot open event log " + jsonl.string());
}

EventLog::~EventLog() {
    if (sink_.is_open()) {
        sink_.flush();
    }
}

void EventLog::emit(EntityKind entity, std::string entity_id, std::string event,
                    Attrs attrs) {
    std::lock_guard lock(mu_);
    last_ts_ = std::max(last_ts_, clock_->now());
    EventRecord rec{last_ts_, entity, std::move(entity_id), std::move(event),
                    std::move(attrs)};
    if (sink_.is_open()) {
        sink_ << nlohmann::json(rec).dump() << '\n';
    }
    events_.push_back(std::move(rec));
}

std::vector<EventRecord> EventLog::snapshot() const {
    std::lock_guard lock(mu_);
    return events_;
}

std::size_t EventLog::size() const {
    std::lock_guard lock(mu_);
    return events_.size();
}

void EventLog::flush() {
    std::lock_guard lock(mu_);
    if (sink_.is_open()) {
        sink_.flush();
    }
}

std::vector<EventRecord> read_jsonl(std::istream &in) {
    std::vector<EventRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        try {
            out.push_back(nlohmann::json::parse(line).get<EventRecord>());
        } catch (const nlohmann::json::exception &e) {
            fail(ErrorCode::Io, "event log line " + std::to_string(lineno) +
                                    ": " + e.what());
        }
    }
    return out;
}

std::vector<EventRecord> read_jsonl(const std::filesystem::path &path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::NoActiveSession,
            "no event log at " + path.string());
    return read_jsonl(in);
}

namespace {

std::uint64_t attr_u64(const Attrs &a, const std::string &key) {
    auto it = a.find(key);
    return it == a.end() ? 0 : std::stoull(it->second);
}

std::string attr(const Attrs &a, const std::string &key) {
    auto it = a.find(key);
    return it == a.end() ? std::string() : it->second;
}

std::optional<TaskState> state_after(const std::string &event) {
    static const std::map<std::string, TaskState> kMap{
        {"task_submitted", TaskState::New},
        {"task_scheduled", TaskState::Scheduled},
        {"task_started", TaskState::Running},
        {"task_done", TaskState::Done},
        {"task_failed", TaskState::Failed},
        {"task_retry", TaskState::New},
        {"task_canceled", TaskState::Canceled},
        {"task_requeued", TaskState::New},
        {"task_rejected", TaskState::Failed},
    };
    auto it = kMap.find(event);
    if (it == kMap.end()) {
        return std::nullopt;
    }
    return it->second;
}

} // namespace

nlohmann::json replay_status(const std::vector<EventRecord> &events) {
    std::map<std::string, Attrs> pilots;
    std::map<std::string, std::pair<TaskState, std::string>> tasks;
    for (const auto &e : events) {
        if (e.entity == EntityKind::Pilot) {
            if (e.event == "pilot_created") {
                pilots[e.entity_id] = e.attrs;
            } else if (e.event == "pilot_removed") {
                pilots.erase(e.entity_id);
            }
            continue;
        }
        if (e.entity != EntityKind::Task) {
            continue;
        }
        if (auto s = state_after(e.event)) {
            auto &[state, pilot] = tasks[e.entity_id];
            state = *s;
            if (*s == TaskState::Scheduled) {
                pilot = attr(e.attrs, "pilot");
            } else if (*s == TaskState::New || is_terminal(*s)) {
                pilot.clear();
            }
        }
    }

    std::map<std::string, std::uint64_t> outstanding;
    nlohmann::json counts = nlohmann::json::object();
    for (auto s : {TaskState::New, TaskState::Scheduled, TaskState::Running,
                   TaskState::Done, TaskState::Failed, TaskState::Canceled}) {
        counts[std::string(to_string(s))] = 0;
    }
    for (const auto &[id, sp] : tasks) {
        const auto &[state, pilot] = sp;
        counts[std::string(to_string(state))] =
            counts[std::string(to_string(state))].get<std::uint64_t>() + 1;
        if (!pilot.empty()) {
            ++outstanding[pilot];
        }
    }

    nlohmann::json plist = nlohmann::json::array();
    for (const auto &[name, a] : pilots) {
        plist.push_back({{"name", name},
                         {"backend_kind", attr(a, "backend_kind")},
                         {"total_cores", attr_u64(a, "total_cores")},
                         {"total_gpus", attr_u64(a, "total_gpus")},
                         {"qpu_qubits", attr_u64(a, "qpu_qubits")},
                         {"outstanding", outstanding[name]}});
    }
    return {{"pilots", plist},
            {"pending", counts["NEW"]},
            {"counts", counts},
            {"tasks_total", tasks.size()}};
}

std::vector<std::string> audit_assignments(const std::vector<EventRecord> &events) {
    std::map<std::string, Attrs> capacity;
    std::vector<std::string> violations;
    for (const auto &e : events) {
        if (e.entity == EntityKind::Pilot && e.event == "pilot_created") {
            capacity[e.entity_id] = e.attrs;
            continue;
        }
        if (e.entity != EntityKind::Task || e.event != "task_scheduled") {
            continue;
        }
        const std::string pilot = attr(e.attrs, "pilot");
        auto it = capacity.find(pilot);
        if (it == capacity.end()) {
            violations.push_back(e.entity_id + ": scheduled on unknown pilot '" +
                                 pilot + "'");
            continue;
        }
        const Attrs &cap = it->second;
        auto check = [&](const char *need, const char *have) {
            if (attr_u64(e.attrs, need) > attr_u64(cap, have)) {
                violations.push_back(e.entity_id + ": " + need + "=" +
                                     attr(e.attrs, need) + " exceeds " + pilot +
                                     "." + have + "=" + attr(cap, have));
            }
        };
        check("cores", "total_cores");
        check("gpus", "total_gpus");
        check("qubits", "qubit_capacity");
        const std::string target = attr(e.attrs, "target");
        if (!target.empty() && target != pilot) {
            violations.push_back(e.entity_id + ": affinity " + target +
                                 " violated by " + pilot);
        }
    }
    return violations;
}

} // namespace pilotq
