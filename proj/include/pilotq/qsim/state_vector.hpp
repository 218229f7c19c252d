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
 * Dense state vector with in-place gate kernels.
 *
 * Basis index bit q holds the state of qubit q (little-endian).
 */
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pilotq/qsim/circuit.hpp"
#include "pilotq/qsim/observable.hpp"

namespace pilotq::qsim {

using Complex = std::complex<double>;

/// Row-major 2x2 unitary.
struct Matrix2 {
    Complex m00, m01, m10, m11;
};

Matrix2 gate_matrix(const Gate &gate);
Matrix2 adjoint(const Matrix2 &m);

class StateVector {
  public:
    /// |0...0> on n qubits.
    explicit StateVector(std::size_t num_qubits);
    StateVector(std::size_t num_qubits, std::vector<Complex> amplitudes);

    [[nodiscard]] std::size_t num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] std::size_t size() const noexcept { return amps_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept {
        return amps_;
    }
    [[nodiscard]] std::span<Complex> amplitudes() noexcept { return amps_; }
    Complex &operator[](std::size_t i) noexcept { return amps_[i]; }
    const Complex &operator[](std::size_t i) const noexcept { return amps_[i]; }

    void apply(const Gate &gate);
    /// Applies the inverse (conjugate transpose) of `gate`.
    void apply_inverse(const Gate &gate);
    void apply_matrix(const Matrix2 &m, std::size_t qubit);
    void apply_cnot(std::size_t control, std::size_t target);
    void apply_cz(std::size_t a, std::size_t b);
    /// Multiplies in place by a Pauli string given as masks.
    void apply_pauli(const PauliMasks &masks);

    [[nodiscard]] double norm_squared() const noexcept;
    [[nodiscard]] Complex inner(const StateVector &other) const;

  private:
    std::size_t num_qubits_;
    std::vector<Complex> amps_;
};

} // namespace pilotq::qsim
