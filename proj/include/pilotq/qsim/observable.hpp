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
#include <string>
#include <vector>

#include "json.hpp"

namespace pilotq::qsim {

/// One weighted Pauli string. `paulis[q]` is the letter acting on qubit q,
/// the same little-endian order used for basis indices and bitstrings.
struct PauliTerm {
    double coefficient{1.0};
    std::string paulis;

    bool operator==(const PauliTerm &) const = default;
};

/// Bit masks for fast application: qubits with X/Y flip, qubits with Z/Y
/// contribute a sign, and the count of Y letters gives a global i^k.
struct PauliMasks {
    std::uint64_t x_mask{0};
    std::uint64_t z_mask{0};
    std::size_t num_y{0};
};

PauliMasks masks_of(const std::string &paulis);

/// Real-weighted sum of Pauli strings, Hermitian by construction.
class PauliObservable {
  public:
    PauliObservable() = default;
    explicit PauliObservable(std::vector<PauliTerm> terms);

    /// Single-term convenience, e.g. `PauliObservable::single("ZZ")`.
    static PauliObservable single(std::string paulis, double coefficient = 1.0);
    /// Z on one qubit, identity elsewhere.
    static PauliObservable z_on(std::size_t qubit, std::size_t num_qubits);

    [[nodiscard]] const std::vector<PauliTerm> &terms() const noexcept {
        return terms_;
    }
    [[nodiscard]] std::size_t num_qubits() const noexcept;
    [[nodiscard]] bool empty() const noexcept { return terms_.empty(); }
    /// Every letter is I or Z, so the observable is diagonal in the
    /// computational basis.
    [[nodiscard]] bool is_diagonal() const noexcept;

    bool operator==(const PauliObservable &) const = default;

  private:
    std::vector<PauliTerm> terms_;
};

void to_json(nlohmann::json &j, const PauliTerm &t);
void from_json(const nlohmann::json &j, PauliTerm &t);
void to_json(nlohmann::json &j, const PauliObservable &o);
void from_json(const nlohmann::json &j, PauliObservable &o);

} // namespace pilotq::qsim
