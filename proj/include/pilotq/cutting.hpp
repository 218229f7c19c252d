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
 * Wire cutting for cluster-structured circuits. A cut replaces one wire by
 * an 8-term quasi-probability mix of (measure, re-prepare) pairs so the
 * fragments run independently and recombine classically.
 */
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "pilotq/metrics.hpp"
#include "pilotq/qsim/circuit.hpp"
#include "pilotq/qsim/observable.hpp"
#include "pilotq/qsim/simulator.hpp"

namespace pilotq {

class PilotManager;

namespace cut {

enum class Basis { Z, X, Y };
enum class PrepState { Zero, One, Plus, Minus, PlusI, MinusI };

char basis_letter(Basis b) noexcept;
const char *prep_name(PrepState s) noexcept;

/// One entry of the single-cut identity: rho = sum_t c_t Tr(O_t rho) rho_t.
struct WireCutEntry {
    char observable;  // 'I', 'X', 'Y' or 'Z'
    PrepState prep;
    double coefficient;
};

/// The eight single-cut terms, in a fixed order.
const std::array<WireCutEntry, 8> &wire_cut_table();

/// Basis that measures `observable` ('I' and 'Z' share Z).
Basis measurement_basis(char observable);

/// Sizes of each consecutive qubit block, with `reps` EfficientSU2
/// repetitions per block. Params are consumed block by block.
qsim::Circuit clustered_circuit(std::span<const std::size_t> cluster_sizes,
                                std::size_t reps, std::span<const double> params);
/// Same layout with angles drawn from `seed`.
qsim::Circuit clustered_circuit(std::span<const std::size_t> cluster_sizes,
                                std::size_t reps, std::uint64_t seed);
std::size_t clustered_param_count(std::span<const std::size_t> cluster_sizes,
                                  std::size_t reps);

struct Fragment {
    /// Original qubits owned by this fragment, ascending; local wire i is
    /// qubits[i]. Incoming cut wires follow at the end.
    std::vector<std::size_t> qubits;
    /// Gate list on local wires, angles bound.
    std::vector<qsim::Gate> gates;
    std::vector<std::size_t> incoming;  // cut indices
    std::vector<std::size_t> outgoing;  // cut indices
    std::size_t width{0};
};

struct Cut {
    std::size_t source_fragment{0};
    std::size_t source_wire{0};
    std::size_t dest_fragment{0};
    std::size_t dest_wire{0};
    /// Original qubit whose wire is cut.
    std::size_t qubit{0};
};

struct WireLocation {
    std::size_t fragment{0};
    std::size_t wire{0};
};

struct CutPlan {
    std::size_t num_qubits{0};
    std::vector<Fragment> fragments;
    std::vector<Cut> cuts;

    [[nodiscard]] std::size_t k() const noexcept { return cuts.size(); }
    [[nodiscard]] std::size_t max_fragment_width() const noexcept;
    /// Where an original qubit ends up at the end of the circuit.
    [[nodiscard]] WireLocation locate(std::size_t qubit) const;
};

/// Cuts the source wire of every coupling CNOT. A boundary between qubits
/// b-1 and b qualifies when CNOT(b-1, b) is the only gate crossing it and
/// the last gate on wire b-1. Throws NotCutFriendly
/// when no boundary exists and the circuit is wider than `max_width`,
/// WidthExceeded when a fragment is still too wide.
CutPlan find_cuts(const qsim::Circuit &circuit, std::size_t max_width);

/// (fragment value index, identity bits over the fragment's outgoing cuts)
struct FragmentValueKey {
    std::size_t subexperiment{0};
    std::uint32_t identity_mask{0};
    auto operator<=>(const FragmentValueKey &) const = default;
};

struct Subexperiment {
    std::size_t fragment_index{0};
    /// One per outgoing cut of the fragment, same order as Fragment::outgoing.
    std::vector<Basis> measure_settings;
    /// One per incoming cut, same order as Fragment::incoming.
    std::vector<PrepState> prep_settings;
    qsim::Circuit circuit;
    /// Local wires carrying the observable part after basis rotation.
    std::uint64_t observable_mask{0};
    /// Local wire of each outgoing cut.
    std::vector<std::size_t> outgoing_wires;

    /// Z-parity mask measured for a given identity selection.
    [[nodiscard]] std::uint64_t parity_mask(std::uint32_t identity_mask) const;
    /// Diagonal Z string for parity_mask(identity_mask).
    [[nodiscard]] qsim::PauliTerm parity_term(std::uint32_t identity_mask) const;
    [[nodiscard]] std::uint32_t identity_variants() const noexcept {
        return 1u << outgoing_wires.size();
    }
};

struct ReconstructionTerm {
    double coefficient{1.0};
    /// Index into wire_cut_table() per cut.
    std::vector<std::uint8_t> assignment;
    /// One factor per fragment.
    std::vector<FragmentValueKey> factors;
};

struct CutExperiments {
    std::vector<Subexperiment> subexperiments;
    std::vector<ReconstructionTerm> terms;
};

/// `observable` must be one Pauli string (its coefficient is ignored here
/// and applied by the caller); multi-term observables throw
/// UnsupportedObservable.
CutExperiments generate_subexperiments(const qsim::Circuit &circuit, const CutPlan &plan,
                                       const qsim::PauliObservable &observable);

/// shots == 0 means exact.
struct EvalMode {
    std::size_t shots{0};
    std::uint64_t seed{0};
};

double fragment_value(const Subexperiment &sub, std::uint32_t identity_mask,
                      const EvalMode &mode,
                      std::uint64_t memory_cap = qsim::kDefaultMemoryCapBytes);

/// Sum over terms of coefficient times the product of its fragment values.
/// Throws MissingFragmentValue.
double reconstruct(const std::vector<ReconstructionTerm> &terms,
                   const std::map<FragmentValueKey, double> &values);

/// Product over cuts of (sum |c|)^2, i.e. 16^k.
double sampling_overhead(const CutPlan &plan);

/// Seed used for the subexperiment at `index` under `mode`.
std::uint64_t subexperiment_seed(const EvalMode &mode, std::size_t term,
                                 std::size_t index) noexcept;

/// Plans and evaluates everything in-process, term by term.
double cut_expectation(const qsim::Circuit &circuit, const qsim::PauliObservable &observable,
                       std::size_t max_width, const EvalMode &mode,
                       std::uint64_t memory_cap = qsim::kDefaultMemoryCapBytes);

struct WorkflowOptions {
    std::size_t max_width{0};
    EvalMode mode;
    /// Prefix for task ids; must be unique per manager.
    std::string task_prefix{"cut"};
    double timeout_s{3600.0};
};

struct WorkflowResult {
    double value{0.0};
    std::size_t k{0};
    std::size_t subexperiments{0};
    RunMetrics metrics;
};

/// Plans, submits one quantum task per subexperiment, waits and
/// reconstructs. Phases: plan, execute, reconstruct.
WorkflowResult run_cut_workflow(PilotManager &manager, const qsim::Circuit &circuit,
                                const qsim::PauliObservable &observable,
                                const WorkflowOptions &options);

void to_json(nlohmann::json &j, const Fragment &f);
void to_json(nlohmann::json &j, const Cut &c);
void to_json(nlohmann::json &j, const CutPlan &p);
void to_json(nlohmann::json &j, const Subexperiment &s);

} // namespace cut
} // namespace pilotq
