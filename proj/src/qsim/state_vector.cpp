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

#include "pilotq/qsim/state_vector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "pilotq/error.hpp"

namespace pilotq::qsim {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
const Complex kI{0.0, 1.0};
} // namespace

Matrix2 gate_matrix(const Gate &gate) {
    const double theta = gate.param.value_or(0.0);
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    switch (gate.kind) {
    case GateKind::H: return {kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2};
    case GateKind::X: return {0.0, 1.0, 1.0, 0.0};
    case GateKind::Y: return {0.0, -kI, kI, 0.0};
    case GateKind::Z: return {1.0, 0.0, 0.0, -1.0};
    case GateKind::S: return {1.0, 0.0, 0.0, kI};
    case GateKind::T:
        return {1.0, 0.0, 0.0, std::polar(1.0, std::numbers::pi / 4)};
    case GateKind::RX: return {c, -kI * s, -kI * s, c};
    case GateKind::RY: return {c, -s, s, c};
    case GateKind::RZ: return {std::polar(1.0, -theta / 2), 0.0, 0.0,
                               std::polar(1.0, theta / 2)};
    case GateKind::CNOT:
    case GateKind::CZ: break;
    }
    fail(ErrorCode::Internal, "no 2x2 matrix for a two-qubit gate");
}

Matrix2 adjoint(const Matrix2 &m) {
    return {std::conj(m.m00), std::conj(m.m10), std::conj(m.m01),
            std::conj(m.m11)};
}

StateVector::StateVector(std::size_t num_qubits)
    : num_qubits_(num_qubits), amps_(std::size_t{1} << num_qubits) {
    amps_[0] = 1.0;
}

StateVector::StateVector(std::size_t num_qubits, std::vector<Complex> amplitudes)
    : num_qubits_(num_qubits), amps_(std::move(amplitudes)) {
    require(amps_.size() == (std::size_t{1} << num_qubits),
            ErrorCode::DimensionMismatch, "amplitude count is not 2^n");
}

void StateVector::apply_matrix(const Matrix2 &m, std::size_t qubit) {
    const std::size_t stride = std::size_t{1} << qubit;
    const std::size_t dim = amps_.size();
    // Spelled out on real parts; std::complex operator* carries NaN/Inf
    // recovery that dominates this loop.
    const double ar = m.m00.real(), ai = m.m00.imag(), br = m.m01.real(), bi = m.m01.imag();
    const double cr = m.m10.real(), ci = m.m10.imag(), dr = m.m11.real(), di = m.m11.imag();
    auto *v = reinterpret_cast<double *>(amps_.data());
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            double *p0 = v + 2 * i;
            double *p1 = v + 2 * (i + stride);
            const double x0 = p0[0], y0 = p0[1], x1 = p1[0], y1 = p1[1];
            p0[0] = ar * x0 - ai * y0 + br * x1 - bi * y1;
            p0[1] = ar * y0 + ai * x0 + br * y1 + bi * x1;
            p1[0] = cr * x0 - ci * y0 + dr * x1 - di * y1;
            p1[1] = cr * y0 + ci * x0 + dr * y1 + di * x1;
        }
    }
}

void StateVector::apply_cnot(std::size_t control, std::size_t target) {
    const std::size_t cmask = std::size_t{1} << control;
    const std::size_t tmask = std::size_t{1} << target;
    const std::size_t lo = std::min(cmask, tmask), hi = std::max(cmask, tmask);
    const std::size_t dim = amps_.size();
    // enumerate indices with both bits clear, then set the control bit
    for (std::size_t a = 0; a < dim; a += 2 * hi) {
        for (std::size_t b = a; b < a + hi; b += 2 * lo) {
            for (std::size_t i = b; i < b + lo; ++i) {
                std::swap(amps_[i | cmask], amps_[i | cmask | tmask]);
            }
        }
    }
}

void StateVector::apply_cz(std::size_t a, std::size_t b) {
    const std::size_t both = (std::size_t{1} << a) | (std::size_t{1} << b);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & both) == both) {
            amps_[i] = -amps_[i];
        }
    }
}

void StateVector::apply(const Gate &gate) {
    switch (gate.kind) {
    case GateKind::CNOT: apply_cnot(gate.qubits[0], gate.qubits[1]); return;
    case GateKind::CZ: apply_cz(gate.qubits[0], gate.qubits[1]); return;
    default: apply_matrix(gate_matrix(gate), gate.qubits[0]);
    }
}

void StateVector::apply_inverse(const Gate &gate) {
    switch (gate.kind) {
    case GateKind::CNOT:
    case GateKind::CZ: apply(gate); return; // self-inverse
    default: apply_matrix(adjoint(gate_matrix(gate)), gate.qubits[0]);
    }
}

void StateVector::apply_pauli(const PauliMasks &masks) {
    static const Complex kPhase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const Complex global = kPhase[masks.num_y % 4];
    auto phase = [&](std::size_t i) {
        return (std::popcount(i & masks.z_mask) & 1U) ? -global : global;
    };
    // P|i> = phase(i) |i ^ x_mask>
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        const std::size_t j = i ^ masks.x_mask;
        if (j == i) {
            amps_[i] *= phase(i);
        } else if (i < j) {
            const Complex ai = amps_[i];
            amps_[i] = phase(j) * amps_[j];
            amps_[j] = phase(i) * ai;
        }
    }
}

double StateVector::norm_squared() const noexcept {
    double acc = 0.0;
    for (const auto &a : amps_) {
        acc += std::norm(a);
    }
    return acc;
}

Complex StateVector::inner(const StateVector &other) const {
    require(other.size() == size(), ErrorCode::DimensionMismatch,
            "inner product of states with different sizes");
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        acc += std::conj(amps_[i]) * other.amps_[i];
    }
    return acc;
}

} // namespace pilotq::qsim
