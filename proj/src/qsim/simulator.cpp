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

#include "pilotq/qsim/simulator.hpp"

#include <algorithm>
#include <bit>
#include <random>

#include "pilotq/error.hpp"

namespace pilotq::qsim {

std::uint64_t memory_bytes(std::size_t num_qubits) {
    require(num_qubits >= 1 && num_qubits <= 58, ErrorCode::Validation,
            "memory_bytes: qubit count out of range");
    return std::uint64_t{16} << num_qubits;
}

std::size_t max_qubits(std::uint64_t cap_bytes, std::uint64_t copies) {
    std::size_t n = 0;
    while (n < 58 && copies * memory_bytes(n + 1) < cap_bytes) {
        ++n;
    }
    return n;
}

void check_memory(std::size_t num_qubits, std::uint64_t cap_bytes,
                  std::uint64_t copies) {
    if (num_qubits > max_qubits(cap_bytes, copies)) {
        fail(ErrorCode::MemoryCapExceeded,
             std::to_string(copies) + " state vector(s) of " +
                 std::to_string(num_qubits) + " qubits exceed the " +
                 std::to_string(cap_bytes) + "-byte cap");
    }
}

void run_circuit_from(const Circuit &circuit, StateVector &state) {
    require(state.num_qubits() == circuit.num_qubits,
            ErrorCode::DimensionMismatch, "state and circuit widths differ");
    for (const auto &g : circuit.gates) {
        state.apply(g);
    }
}

StateVector run_circuit(const Circuit &circuit, std::uint64_t memory_cap) {
    validate(circuit);
    check_memory(circuit.num_qubits, memory_cap);
    StateVector state(circuit.num_qubits);
    run_circuit_from(circuit, state);
    return state;
}

double expectation(const StateVector &state, const PauliTerm &term) {
    require(term.paulis.size() == state.num_qubits(),
            ErrorCode::DimensionMismatch,
            "observable acts on " + std::to_string(term.paulis.size()) +
                " qubits, state has " + std::to_string(state.num_qubits()));
    const PauliMasks m = masks_of(term.paulis);
    const auto amps = state.amplitudes();
    // <psi|P|psi> = sum_i conj(psi[i ^ x]) * phase(i) * psi[i]
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const Complex v = std::conj(amps[i ^ m.x_mask]) * amps[i];
        acc += (std::popcount(i & m.z_mask) & 1U) ? -v : v;
    }
    static const Complex kPhase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return term.coefficient * (kPhase[m.num_y % 4] * acc).real();
}

double expectation(const StateVector &state, const PauliObservable &observable) {
    double acc = 0.0;
    for (const auto &t : observable.terms()) {
        acc += expectation(state, t);
    }
    return acc;
}

Counts sample(const StateVector &state, std::size_t shots, std::uint64_t seed) {
    require(shots >= 1, ErrorCode::Validation, "shots must be positive");
    const auto amps = state.amplitudes();
    std::vector<double> cdf(amps.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        acc += std::norm(amps[i]);
        cdf[i] = acc;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, acc);
    std::map<std::size_t, std::uint64_t> by_index;
    for (std::size_t s = 0; s < shots; ++s) {
        const double r = uni(rng);
        auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
        if (it == cdf.end()) {
            --it;
        }
        ++by_index[static_cast<std::size_t>(it - cdf.begin())];
    }
    Counts counts;
    const std::size_t n = state.num_qubits();
    for (const auto &[index, c] : by_index) {
        std::string bits(n, '0');
        for (std::size_t q = 0; q < n; ++q) {
            if ((index >> q) & 1U) {
                bits[q] = '1';
            }
        }
        counts[bits] = c;
    }
    return counts;
}

double sample_expectation(const Counts &counts, const PauliTerm &term) {
    require(term.paulis.find_first_of("XY") == std::string::npos,
            ErrorCode::UnsupportedObservable,
            "sampled expectation needs a diagonal (I/Z) Pauli string");
    std::uint64_t total = 0;
    double acc = 0.0;
    for (const auto &[bits, c] : counts) {
        require(bits.size() == term.paulis.size(), ErrorCode::DimensionMismatch,
                "bitstring and observable widths differ");
        int sign = 1;
        for (std::size_t q = 0; q < bits.size(); ++q) {
            if (term.paulis[q] == 'Z' && bits[q] == '1') {
                sign = -sign;
            }
        }
        acc += sign * static_cast<double>(c);
        total += c;
    }
    require(total > 0, ErrorCode::Validation, "no samples");
    return term.coefficient * acc / static_cast<double>(total);
}

double sample_expectation(const Counts &counts, const PauliObservable &observable) {
    double acc = 0.0;
    for (const auto &t : observable.terms()) {
        acc += sample_expectation(counts, t);
    }
    return acc;
}

namespace {

PauliMasks generator_masks(const Gate &g) {
    std::string p(g.qubits[0] + 1, 'I');
    switch (g.kind) {
    case GateKind::RX: p[g.qubits[0]] = 'X'; break;
    case GateKind::RY: p[g.qubits[0]] = 'Y'; break;
    case GateKind::RZ: p[g.qubits[0]] = 'Z'; break;
    default: fail(ErrorCode::Internal, "gate has no rotation generator");
    }
    return masks_of(p);
}

} // namespace

ValueAndGradient value_and_gradient(const Circuit &circuit,
                                    const PauliObservable &observable,
                                    std::uint64_t memory_cap) {
    validate(circuit);
    require(observable.num_qubits() == circuit.num_qubits,
            ErrorCode::DimensionMismatch,
            "observable width does not match the circuit");
    check_memory(circuit.num_qubits, memory_cap, kGradientStateCopies);

    StateVector psi(circuit.num_qubits);
    run_circuit_from(circuit, psi);

    // lambda = O |psi>, with mu as the per-term scratch vector.
    StateVector lambda(circuit.num_qubits,
                       std::vector<Complex>(psi.size(), Complex{0.0, 0.0}));
    StateVector mu = psi;
    for (const auto &t : observable.terms()) {
        mu = psi;
        mu.apply_pauli(masks_of(t.paulis));
        auto dst = lambda.amplitudes();
        auto src = mu.amplitudes();
        for (std::size_t i = 0; i < dst.size(); ++i) {
            dst[i] += t.coefficient * src[i];
        }
    }

    ValueAndGradient out;
    out.value = psi.inner(lambda).real();
    out.gradient.assign(circuit.num_params(), 0.0);

    // For G = exp(-i theta P / 2): d<O>/d theta = Im <lambda_i | P psi_i>,
    // with psi_i the state right after the gate and lambda_i the
    // back-propagated observable state at the same point.
    for (auto it = circuit.gates.rbegin(); it != circuit.gates.rend(); ++it) {
        if (it->param_index) {
            mu = psi;
            mu.apply_pauli(generator_masks(*it));
            out.gradient[*it->param_index] += lambda.inner(mu).imag();
        }
        psi.apply_inverse(*it);
        lambda.apply_inverse(*it);
    }
    return out;
}

std::vector<double> adjoint_gradient(const Circuit &circuit,
                                     const PauliObservable &observable,
                                     std::uint64_t memory_cap) {
    return value_and_gradient(circuit, observable, memory_cap).gradient;
}

} // namespace pilotq::qsim
