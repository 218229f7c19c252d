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

#include "pilotq/qsim/ansatz.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>
#include <random>

#include "pilotq/error.hpp"

namespace pilotq::qsim {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_param_count(std::size_t expected, std::size_t got) {
    require(expected == got, ErrorCode::ParamCountMismatch,
            "expected " + std::to_string(expected) + " parameters, got " +
                std::to_string(got));
}
} // namespace

std::vector<double> random_angles(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    std::vector<double> out(count);
    for (auto &a : out) {
        a = angle(rng);
    }
    return out;
}

Circuit random_circuit(std::size_t num_qubits, std::size_t depth,
                       std::uint64_t seed) {
    require(num_qubits >= 1, ErrorCode::Validation, "num_qubits must be >= 1");
    require(depth >= 1, ErrorCode::Validation, "depth must be >= 1");
    static constexpr GateKind kChoices[] = {GateKind::H,  GateKind::S,
                                            GateKind::T,  GateKind::RX,
                                            GateKind::RY, GateKind::RZ};
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, std::size(kChoices) - 1);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);

    Circuit c(num_qubits);
    std::vector<std::size_t> pairs(num_qubits > 1 ? num_qubits - 1 : 0);
    for (std::size_t layer = 0; layer < depth; ++layer) {
        for (std::size_t q = 0; q < num_qubits; ++q) {
            const GateKind kind = kChoices[pick(rng)];
            if (is_rotation(kind)) {
                c.add(kind, {q}, angle(rng));
            } else {
                c.add(kind, {q});
            }
        }
        // Greedy pass over a shuffled edge list yields a maximal matching
        // on the path 0-1-...-(n-1).
        std::iota(pairs.begin(), pairs.end(), std::size_t{0});
        std::shuffle(pairs.begin(), pairs.end(), rng);
        std::vector<bool> used(num_qubits, false);
        std::vector<std::size_t> chosen;
        for (auto p : pairs) {
            if (!used[p] && !used[p + 1]) {
                used[p] = used[p + 1] = true;
                chosen.push_back(p);
            }
        }
        std::sort(chosen.begin(), chosen.end());
        for (auto p : chosen) {
            c.cnot(p, p + 1);
        }
    }
    return c;
}

std::size_t efficient_su2_param_count(std::size_t num_qubits, std::size_t reps) {
    return 2 * num_qubits * (reps + 1);
}

Circuit efficient_su2(std::size_t num_qubits, std::size_t reps,
                      std::span<const double> params) {
    require(num_qubits >= 1, ErrorCode::Validation, "num_qubits must be >= 1");
    check_param_count(efficient_su2_param_count(num_qubits, reps), params.size());
    Circuit c(num_qubits);
    std::size_t k = 0;
    for (std::size_t layer = 0; layer <= reps; ++layer) {
        for (std::size_t q = 0; q < num_qubits; ++q) {
            c.ry(q, params[k], k);
            ++k;
            c.rz(q, params[k], k);
            ++k;
        }
        if (layer < reps) {
            for (std::size_t q = 0; q + 1 < num_qubits; ++q) {
                c.cnot(q, q + 1);
            }
        }
    }
    return c;
}

std::size_t sel_param_count(std::size_t num_qubits, std::size_t layers) {
    return 3 * num_qubits * layers;
}

Circuit sel_circuit(std::size_t num_qubits, std::size_t layers,
                    std::span<const double> params) {
    require(num_qubits >= 1, ErrorCode::Validation, "num_qubits must be >= 1");
    check_param_count(sel_param_count(num_qubits, layers), params.size());
    Circuit c(num_qubits);
    std::size_t k = 0;
    for (std::size_t layer = 0; layer < layers; ++layer) {
        for (std::size_t q = 0; q < num_qubits; ++q) {
            c.rz(q, params[k], k);
            c.ry(q, params[k + 1], k + 1);
            c.rz(q, params[k + 2], k + 2);
            k += 3;
        }
        if (num_qubits > 1) {
            const std::size_t range = 1 + layer % (num_qubits - 1);
            for (std::size_t q = 0; q < num_qubits; ++q) {
                c.cnot(q, (q + range) % num_qubits);
            }
        }
    }
    return c;
}

} // namespace pilotq::qsim
