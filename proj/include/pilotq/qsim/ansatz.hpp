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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pilotq/qsim/circuit.hpp"

namespace pilotq::qsim {

/// `depth` layers of one random single-qubit gate per qubit (H, S, T, RX,
/// RY, RZ; angles uniform in [0, 2pi)) followed by CNOTs on a random maximal
/// matching of neighbouring qubits. Angles are fixed, not trainable.
Circuit random_circuit(std::size_t num_qubits, std::size_t depth,
                       std::uint64_t seed);

/// Number of parameters `efficient_su2(n, reps, ...)` expects: 2n(reps+1).
std::size_t efficient_su2_param_count(std::size_t num_qubits, std::size_t reps);

/// reps+1 RY/RZ rotation layers interleaved with reps linear CNOT chains.
/// Trainable order: layer-major, then qubit, RY before RZ.
Circuit efficient_su2(std::size_t num_qubits, std::size_t reps,
                      std::span<const double> params);

/// Number of parameters `sel_circuit(n, layers, ...)` expects: 3n*layers.
std::size_t sel_param_count(std::size_t num_qubits, std::size_t layers);

/// Strongly entangling layers. Each layer applies RZ(a), RY(b), RZ(c) to
/// every qubit, then CNOT(i, (i + r) mod n) for every i with range
/// r = 1 + (layer mod max(n - 1, 1)). A single qubit has no CNOTs.
Circuit sel_circuit(std::size_t num_qubits, std::size_t layers,
                    std::span<const double> params);

/// Uniform angles in [0, 2pi), reproducible per seed.
std::vector<double> random_angles(std::size_t count, std::uint64_t seed);

} // namespace pilotq::qsim
