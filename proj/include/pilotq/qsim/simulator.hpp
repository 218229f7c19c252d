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
 * Circuit execution, measurement sampling, expectation values and adjoint
 * gradients on top of StateVector.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pilotq/qsim/circuit.hpp"
#include "pilotq/qsim/observable.hpp"
#include "pilotq/qsim/state_vector.hpp"

namespace pilotq::qsim {

/// 2 GiB: a single state vector fits up to 26 qubits.
inline constexpr std::uint64_t kDefaultMemoryCapBytes = 2ULL << 30;

/// State vectors held simultaneously by the adjoint sweep.
inline constexpr std::uint64_t kGradientStateCopies = 3;

using Counts = std::map<std::string, std::uint64_t>;

/// Bytes for one n-qubit state vector: 16 * 2^n.
std::uint64_t memory_bytes(std::size_t num_qubits);

/// Largest qubit count for which `copies` state vectors stay strictly below
/// `cap_bytes`. Returns 0 when not even one qubit fits.
std::size_t max_qubits(std::uint64_t cap_bytes, std::uint64_t copies = 1);

/// Throws MemoryCapExceeded unless `copies` n-qubit vectors fit below the cap.
void check_memory(std::size_t num_qubits, std::uint64_t cap_bytes,
                  std::uint64_t copies = 1);

StateVector run_circuit(const Circuit &circuit,
                        std::uint64_t memory_cap = kDefaultMemoryCapBytes);

/// Runs `circuit` starting from `initial` instead of |0...0>.
void run_circuit_from(const Circuit &circuit, StateVector &state);

double expectation(const StateVector &state, const PauliTerm &term);
double expectation(const StateVector &state, const PauliObservable &observable);

/// i.i.d. computational-basis samples. Keys are bitstrings where character q
/// is the measured value of qubit q.
Counts sample(const StateVector &state, std::size_t shots, std::uint64_t seed);

/// Empirical mean of a diagonal (I/Z only) Pauli string over `counts`.
double sample_expectation(const Counts &counts, const PauliTerm &term);
double sample_expectation(const Counts &counts, const PauliObservable &observable);

struct ValueAndGradient {
    double value{0.0};
    std::vector<double> gradient;
};

/// d<O>/d(theta_j) for every trainable parameter by the adjoint method.
std::vector<double> adjoint_gradient(const Circuit &circuit,
                                     const PauliObservable &observable,
                                     std::uint64_t memory_cap = kDefaultMemoryCapBytes);

ValueAndGradient value_and_gradient(const Circuit &circuit,
                                    const PauliObservable &observable,
                                    std::uint64_t memory_cap = kDefaultMemoryCapBytes);

} // namespace pilotq::qsim
