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

#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <memory>
#include <mutex>
#include <vector>

#include "json.hpp"

#include "pilotq/clock.hpp"
#include "pilotq/model.hpp"

namespace pilotq {

/// Append-only lifecycle log shared by the manager and its agents. Each
/// event is stamped under the log's lock, so timestamps never decrease
/// within one log. Events are kept in memory and, when a file is attached,
/// written as one JSON object per line.
class EventLog {
  public:
    explicit EventLog(std::shared_ptr<const Clock> clock);
    EventLog(std::shared_ptr<const Clock> clock, const std::filesystem::path &jsonl);
    ~EventLog();

    EventLog(const EventLog &) = delete;
    EventLog &operator=(const EventLog &) = delete;

    void emit(EntityKind entity, std::string entity_id, std::string event,
              Attrs attrs = {});

    [[nodiscard]] std::vector<EventRecord> snapshot() const;
    [[nodiscard]] std::size_t size() const;
    void flush();

  private:
    std::shared_ptr<const Clock> clock_;
    mutable std::mutex mu_;
    std::vector<EventRecord> events_;
    std::ofstream sink_;
    double last_ts_{0.0};
};

std::vector<EventRecord> read_jsonl(std::istream &in);
std::vector<EventRecord> read_jsonl(const std::filesystem::path &path);

/// Rebuilds the manager status snapshot (pilots, pending, per-state task
/// counts) from a log alone. Matches PilotManager::status() minus uptime.
nlohmann::json replay_status(const std::vector<EventRecord> &events);

/// Checks every `task_scheduled` event against the capacities announced by
/// the matching `pilot_created` event. Returns one message per violation.
std::vector<std::string> audit_assignments(const std::vector<EventRecord> &events);

} // namespace pilotq
