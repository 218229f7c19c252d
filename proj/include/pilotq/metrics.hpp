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

#include <cstdint>
#include <map>
#include <string>

#include "json.hpp"

namespace pilotq {

/// Summary of one benchmark or workflow run.
struct RunMetrics {
    std::string workload;
    std::map<std::string, std::string> params;
    std::map<std::string, double> phases_s;
    std::uint64_t tasks_total{0};
    std::uint64_t tasks_done{0};
    std::uint64_t tasks_failed{0};
    std::uint64_t tasks_canceled{0};
    double wall_s{0.0};
    double throughput_tasks_per_s{0.0};

    /// Sets wall time and derives throughput from tasks_done.
    void finish(double wall);
    /// Adds another run's task counts and phase times.
    void merge(const RunMetrics &other);
};

void to_json(nlohmann::json &j, const RunMetrics &m);
void from_json(const nlohmann::json &j, RunMetrics &m);

} // namespace pilotq
