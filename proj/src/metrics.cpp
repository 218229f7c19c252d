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

#include "pilotq/metrics.hpp"

namespace pilotq {

void RunMetrics::finish(double wall) {
    wall_s = wall;
    throughput_tasks_per_s = wall > 0.0 ? static_cast<double>(tasks_done) / wall : 0.0;
}

void RunMetrics::merge(const RunMetrics &other) {
    tasks_total += other.tasks_total;
    tasks_done += other.tasks_done;
    tasks_failed += other.tasks_failed;
    tasks_canceled += other.tasks_canceled;
    for (const auto &[phase, s] : other.phases_s) {
        phases_s[phase] += s;
    }
}

void to_json(nlohmann::json &j, const RunMetrics &m) {
    j = {{"workload", m.workload},
         {"params", m.params},
         {"phases_s", m.phases_s},
         {"tasks_total", m.tasks_total},
         {"tasks_done", m.tasks_done},
         {"tasks_failed", m.tasks_failed},
         {"tasks_canceled", m.tasks_canceled},
         {"wall_s", m.wall_s},
         {"throughput_tasks_per_s", m.throughput_tasks_per_s}};
}

void from_json(const nlohmann::json &j, RunMetrics &m) {
    j.at("workload").get_to(m.workload);
    m.params = j.value("params", std::map<std::string, std::string>{});
    m.phases_s = j.value("phases_s", std::map<std::string, double>{});
    m.tasks_total = j.value("tasks_total", std::uint64_t{0});
    m.tasks_done = j.value("tasks_done", std::uint64_t{0});
    m.tasks_failed = j.value("tasks_failed", std::uint64_t{0});
    m.tasks_canceled = j.value("tasks_canceled", std::uint64_t{0});
    m.wall_s = j.value("wall_s", 0.0);
    m.throughput_tasks_per_s = j.value("throughput_tasks_per_s", 0.0);
}

} // namespace pilotq
