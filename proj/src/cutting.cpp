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

#include "pilotq/cutting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pilotq/error.hpp"
#include "pilotq/manager.hpp"
#include "pilotq/qsim/ansatz.hpp"

namespace pilotq::cut {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    while (exp-- > 0) {
        r *= base;
    }
    return r;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void add_prep(qsim::Circuit &c, std::size_t w, PrepState s) {
    switch (s) {
    case PrepState::Zero:
        break;
    case PrepState::One:
        c.x(w);
        break;
    case PrepState::Plus:
        c.h(w);
        break;
    case PrepState::Minus:
        c.x(w).h(w);
        break;
    case PrepState::PlusI:
        c.h(w).s(w);
        break;
    case PrepState::MinusI:
        c.x(w).h(w).s(w);
        break;
    }
}

// Rotates so that measuring Z afterwards measures `letter` before.
void add_basis_change(qsim::Circuit &c, std::size_t w, char letter) {
    if (letter == 'X') {
        c.h(w);
    } else if (letter == 'Y') {
        c.s(w).z(w).h(w);  // H S^dagger
    }
}

qsim::Gate local_gate(const qsim::Gate &g, std::vector<std::size_t> qubits) {
    qsim::Gate out = g;
    out.qubits = std::move(qubits);
    out.param_index.reset();
    return out;
}

} // namespace

char basis_letter(Basis b) noexcept {
    switch (b) {
    case Basis::X:
        return 'X';
    case Basis::Y:
        return 'Y';
    case Basis::Z:
        break;
    }
    return 'Z';
}

const char *prep_name(PrepState s) noexcept {
    switch (s) {
    case PrepState::Zero:
        return "0";
    case PrepState::One:
        return "1";
    case PrepState::Plus:
        return "+";
    case PrepState::Minus:
        return "-";
    case PrepState::PlusI:
        return "+i";
    case PrepState::MinusI:
        return "-i";
    }
    return "?";
}

const std::array<WireCutEntry, 8> &wire_cut_table() {
    static const std::array<WireCutEntry, 8> table{{
        {'I', PrepState::Zero, 0.5},
        {'I', PrepState::One, 0.5},
        {'Z', PrepState::Zero, 0.5},
        {'Z', PrepState::One, -0.5},
        {'X', PrepState::Plus, 0.5},
        {'X', PrepState::Minus, -0.5},
        {'Y', PrepState::PlusI, 0.5},
        {'Y', PrepState::MinusI, -0.5},
    }};
    return table;
}

Basis measurement_basis(char observable) {
    switch (observable) {
    case 'I':
    case 'Z':
        return Basis::Z;
    case 'X':
        return Basis::X;
    case 'Y':
        return Basis::Y;
    default:
        fail(ErrorCode::Validation, std::string("not a Pauli letter: ") + observable);
    }
}

std::size_t clustered_param_count(std::span<const std::size_t> cluster_sizes,
                                  std::size_t reps) {
    std::size_t total = 0;
    for (auto n : cluster_sizes) {
        total += qsim::efficient_su2_param_count(n, reps);
    }
    return total;
}

qsim::Circuit clustered_circuit(std::span<const std::size_t> cluster_sizes, std::size_t reps,
                                std::span<const double> params) {
    require(!cluster_sizes.empty(), ErrorCode::Validation, "cluster_sizes is empty");
    for (auto n : cluster_sizes) {
        require(n >= 1, ErrorCode::Validation, "cluster sizes must be positive");
    }
    const std::size_t expected = clustered_param_count(cluster_sizes, reps);
    require(params.size() == expected, ErrorCode::ParamCountMismatch,
            "expected " + std::to_string(expected) + " parameters, got " +
                std::to_string(params.size()));

    const std::size_t n = std::accumulate(cluster_sizes.begin(), cluster_sizes.end(),
                                          std::size_t{0});
    qsim::Circuit c(n);
    std::size_t qoff = 0;
    std::size_t poff = 0;
    for (auto size : cluster_sizes) {
        const std::size_t np = qsim::efficient_su2_param_count(size, reps);
        const auto block = qsim::efficient_su2(size, reps, params.subspan(poff, np));
        for (const auto &g : block.gates) {
            qsim::Gate shifted = g;
            for (auto &q : shifted.qubits) {
                q += qoff;
            }
            if (shifted.param_index) {
                *shifted.param_index += poff;
            }
            c.gates.push_back(std::move(shifted));
        }
        qoff += size;
        poff += np;
    }
    std::size_t first = 0;
    for (std::size_t i = 0; i + 1 < cluster_sizes.size(); ++i) {
        first += cluster_sizes[i];
        c.cnot(first - 1, first);
    }
    return c;
}

qsim::Circuit clustered_circuit(std::span<const std::size_t> cluster_sizes, std::size_t reps,
                                std::uint64_t seed) {
    const auto params = qsim::random_angles(clustered_param_count(cluster_sizes, reps), seed);
    return clustered_circuit(cluster_sizes, reps, params);
}

std::size_t CutPlan::max_fragment_width() const noexcept {
    std::size_t w = 0;
    for (const auto &f : fragments) {
        w = std::max(w, f.width);
    }
    return w;
}

WireLocation CutPlan::locate(std::size_t qubit) const {
    require(qubit < num_qubits, ErrorCode::Validation, "qubit out of range");
    for (const auto &c : cuts) {
        if (c.qubit == qubit) {
            return {c.dest_fragment, c.dest_wire};
        }
    }
    for (std::size_t f = 0; f < fragments.size(); ++f) {
        const auto &qs = fragments[f].qubits;
        auto it = std::find(qs.begin(), qs.end(), qubit);
        if (it != qs.end()) {
            return {f, static_cast<std::size_t>(it - qs.begin())};
        }
    }
    fail(ErrorCode::Internal, "qubit not owned by any fragment");
}

CutPlan find_cuts(const qsim::Circuit &circuit, std::size_t max_width) {
    qsim::validate(circuit);
    require(max_width >= 1, ErrorCode::Validation, "max_width must be >= 1");
    const std::size_t n = circuit.num_qubits;
    const auto &gates = circuit.gates;

    // boundary b sits between qubits b-1 and b
    std::vector<std::size_t> crossing(n + 1, 0);
    std::vector<std::size_t> crossing_gate(n + 1, kNone);
    for (std::size_t g = 0; g < gates.size(); ++g) {
        if (gates[g].qubits.size() != 2) {
            continue;
        }
        const auto [lo, hi] = std::minmax(gates[g].qubits[0], gates[g].qubits[1]);
        for (std::size_t b = lo + 1; b <= hi; ++b) {
            ++crossing[b];
            crossing_gate[b] = g;
        }
    }

    std::vector<std::size_t> boundaries;
    std::vector<std::size_t> cut_gates;
    for (std::size_t b = 1; b < n; ++b) {
        if (crossing[b] != 1) {
            continue;
        }
        const std::size_t g = crossing_gate[b];
        const auto &gate = gates[g];
        if (gate.kind != qsim::GateKind::CNOT || gate.qubits[0] != b - 1 ||
            gate.qubits[1] != b) {
            continue;
        }
        bool last_on_wire = true;
        for (std::size_t h = g + 1; h < gates.size() && last_on_wire; ++h) {
            const auto &qs = gates[h].qubits;
            last_on_wire = std::find(qs.begin(), qs.end(), b - 1) == qs.end();
        }
        if (last_on_wire) {
            boundaries.push_back(b);
            cut_gates.push_back(g);
        }
    }

    if (boundaries.empty()) {
        require(n <= max_width, ErrorCode::NotCutFriendly,
                "no cluster boundary found in a " + std::to_string(n) +
                    "-qubit circuit wider than " + std::to_string(max_width));
    }

    CutPlan plan;
    plan.num_qubits = n;
    const std::size_t nfrag = boundaries.size() + 1;
    plan.fragments.resize(nfrag);
    std::vector<std::size_t> owner(n);
    std::vector<std::size_t> lo_of(nfrag);
    for (std::size_t f = 0; f < nfrag; ++f) {
        const std::size_t lo = f == 0 ? 0 : boundaries[f - 1];
        const std::size_t hi = f + 1 < nfrag ? boundaries[f] : n;
        lo_of[f] = lo;
        for (std::size_t q = lo; q < hi; ++q) {
            plan.fragments[f].qubits.push_back(q);
            owner[q] = f;
        }
        plan.fragments[f].width = hi - lo;
    }

    std::vector<std::size_t> cut_of_gate(gates.size(), kNone);
    for (std::size_t j = 0; j < boundaries.size(); ++j) {
        Cut c;
        c.qubit = boundaries[j] - 1;
        c.source_fragment = j;
        c.source_wire = c.qubit - lo_of[j];
        c.dest_fragment = j + 1;
        c.dest_wire = plan.fragments[j + 1].width++;
        plan.fragments[j].outgoing.push_back(j);
        plan.fragments[j + 1].incoming.push_back(j);
        plan.cuts.push_back(c);
        cut_of_gate[cut_gates[j]] = j;
    }

    for (std::size_t g = 0; g < gates.size(); ++g) {
        const auto &gate = gates[g];
        if (cut_of_gate[g] != kNone) {
            const Cut &c = plan.cuts[cut_of_gate[g]];
            auto &frag = plan.fragments[c.dest_fragment];
            frag.gates.push_back(
                local_gate(gate, {c.dest_wire, gate.qubits[1] - lo_of[c.dest_fragment]}));
            continue;
        }
        if (gate.qubits.size() == 1) {
            const std::size_t q = gate.qubits[0];
            plan.fragments[owner[q]].gates.push_back(local_gate(gate, {q - lo_of[owner[q]]}));
            continue;
        }
        const std::size_t f = owner[gate.qubits[0]];
        require(owner[gate.qubits[1]] == f, ErrorCode::Internal, "gate spans fragments");
        std::vector<std::size_t> local;
        for (auto q : gate.qubits) {
            local.push_back(q - lo_of[f]);
        }
        plan.fragments[f].gates.push_back(local_gate(gate, std::move(local)));
    }

    for (std::size_t f = 0; f < nfrag; ++f) {
        require(plan.fragments[f].width <= max_width, ErrorCode::WidthExceeded,
                "fragment " + std::to_string(f) + " needs " +
                    std::to_string(plan.fragments[f].width) + " qubits, max_width is " +
                    std::to_string(max_width));
    }
    return plan;
}

std::uint64_t Subexperiment::parity_mask(std::uint32_t identity_mask) const {
    std::uint64_t m = observable_mask;
    for (std::size_t i = 0; i < outgoing_wires.size(); ++i) {
        if (((identity_mask >> i) & 1u) == 0) {
            m |= std::uint64_t{1} << outgoing_wires[i];
        }
    }
    return m;
}

qsim::PauliTerm Subexperiment::parity_term(std::uint32_t identity_mask) const {
    const std::uint64_t m = parity_mask(identity_mask);
    std::string letters(circuit.num_qubits, 'I');
    for (std::size_t q = 0; q < letters.size(); ++q) {
        if ((m >> q) & 1u) {
            letters[q] = 'Z';
        }
    }
    return {1.0, letters};
}

CutExperiments generate_subexperiments(const qsim::Circuit &circuit, const CutPlan &plan,
                                       const qsim::PauliObservable &observable) {
    require(observable.terms().size() == 1, ErrorCode::UnsupportedObservable,
            "cut one Pauli string at a time");
    const std::string &letters = observable.terms().front().paulis;
    require(letters.size() == circuit.num_qubits && plan.num_qubits == circuit.num_qubits,
            ErrorCode::DimensionMismatch, "observable, plan and circuit widths differ");

    const std::size_t nfrag = plan.fragments.size();
    std::vector<std::string> local_letters(nfrag);
    for (std::size_t f = 0; f < nfrag; ++f) {
        local_letters[f].assign(plan.fragments[f].width, 'I');
    }
    for (std::size_t q = 0; q < letters.size(); ++q) {
        const auto loc = plan.locate(q);
        local_letters[loc.fragment][loc.wire] = letters[q];
    }

    CutExperiments out;
    std::vector<std::size_t> offset(nfrag);
    for (std::size_t f = 0; f < nfrag; ++f) {
        const Fragment &frag = plan.fragments[f];
        const std::size_t nout = frag.outgoing.size();
        const std::size_t nin = frag.incoming.size();
        const std::size_t variants = ipow(3, nout) * ipow(6, nin);
        offset[f] = out.subexperiments.size();

        std::uint64_t obs_mask = 0;
        for (std::size_t w = 0; w < frag.width; ++w) {
            if (local_letters[f][w] != 'I') {
                obs_mask |= std::uint64_t{1} << w;
            }
        }

        for (std::size_t v = 0; v < variants; ++v) {
            Subexperiment sub;
            sub.fragment_index = f;
            sub.observable_mask = obs_mask;
            std::size_t rest = v;
            for (std::size_t i = 0; i < nout; ++i) {
                sub.measure_settings.push_back(static_cast<Basis>(rest % 3));
                rest /= 3;
                sub.outgoing_wires.push_back(plan.cuts[frag.outgoing[i]].source_wire);
            }
            for (std::size_t i = 0; i < nin; ++i) {
                sub.prep_settings.push_back(static_cast<PrepState>(rest % 6));
                rest /= 6;
            }

            qsim::Circuit c(frag.width);
            for (std::size_t i = 0; i < nin; ++i) {
                add_prep(c, plan.cuts[frag.incoming[i]].dest_wire, sub.prep_settings[i]);
            }
            c.gates.insert(c.gates.end(), frag.gates.begin(), frag.gates.end());
            for (std::size_t i = 0; i < nout; ++i) {
                add_basis_change(c, sub.outgoing_wires[i], basis_letter(sub.measure_settings[i]));
            }
            for (std::size_t w = 0; w < frag.width; ++w) {
                add_basis_change(c, w, local_letters[f][w]);
            }
            sub.circuit = std::move(c);
            out.subexperiments.push_back(std::move(sub));
        }
    }

    const auto &table = wire_cut_table();
    const std::size_t k = plan.k();
    const std::size_t nterms = ipow(8, k);
    out.terms.reserve(nterms);
    for (std::size_t t = 0; t < nterms; ++t) {
        ReconstructionTerm term;
        std::size_t rest = t;
        for (std::size_t j = 0; j < k; ++j) {
            term.assignment.push_back(static_cast<std::uint8_t>(rest % 8));
            term.coefficient *= table[rest % 8].coefficient;
            rest /= 8;
        }
        for (std::size_t f = 0; f < nfrag; ++f) {
            const Fragment &frag = plan.fragments[f];
            std::size_t local = 0;
            std::size_t radix = 1;
            std::uint32_t identity = 0;
            for (std::size_t i = 0; i < frag.outgoing.size(); ++i) {
                const char obs = table[term.assignment[frag.outgoing[i]]].observable;
                local += static_cast<std::size_t>(measurement_basis(obs)) * radix;
                radix *= 3;
                if (obs == 'I') {
                    identity |= 1u << i;
                }
            }
            for (std::size_t i = 0; i < frag.incoming.size(); ++i) {
                local += static_cast<std::size_t>(table[term.assignment[frag.incoming[i]]].prep) *
                         radix;
                radix *= 6;
            }
            term.factors.push_back({offset[f] + local, identity});
        }
        out.terms.push_back(std::move(term));
    }
    return out;
}

namespace {

// All identity variants of one subexperiment from a single simulation.
std::vector<double> evaluate_variants(const Subexperiment &sub, const EvalMode &mode,
                                      std::uint64_t memory_cap) {
    const auto state = qsim::run_circuit(sub.circuit, memory_cap);
    std::vector<double> values;
    if (mode.shots == 0) {
        for (std::uint32_t m = 0; m < sub.identity_variants(); ++m) {
            values.push_back(qsim::expectation(state, sub.parity_term(m)));
        }
    } else {
        const auto counts = qsim::sample(state, mode.shots, mode.seed);
        for (std::uint32_t m = 0; m < sub.identity_variants(); ++m) {
            values.push_back(qsim::sample_expectation(counts, sub.parity_term(m)));
        }
    }
    return values;
}

} // namespace

double fragment_value(const Subexperiment &sub, std::uint32_t identity_mask,
                      const EvalMode &mode, std::uint64_t memory_cap) {
    require(identity_mask < sub.identity_variants(), ErrorCode::Validation,
            "identity mask has bits beyond the outgoing cuts");
    const auto state = qsim::run_circuit(sub.circuit, memory_cap);
    const auto term = sub.parity_term(identity_mask);
    if (mode.shots == 0) {
        return qsim::expectation(state, term);
    }
    return qsim::sample_expectation(qsim::sample(state, mode.shots, mode.seed), term);
}

double reconstruct(const std::vector<ReconstructionTerm> &terms,
                   const std::map<FragmentValueKey, double> &values) {
    double total = 0.0;
    for (const auto &t : terms) {
        double prod = t.coefficient;
        for (const auto &key : t.factors) {
            auto it = values.find(key);
            require(it != values.end(), ErrorCode::MissingFragmentValue,
                    "no value for subexperiment " + std::to_string(key.subexperiment) +
                        " identity mask " + std::to_string(key.identity_mask));
            prod *= it->second;
        }
        total += prod;
    }
    return total;
}

double sampling_overhead(const CutPlan &plan) {
    double per_cut = 0.0;
    for (const auto &e : wire_cut_table()) {
        per_cut += std::abs(e.coefficient);
    }
    double gamma = 1.0;
    for (std::size_t j = 0; j < plan.k(); ++j) {
        gamma *= per_cut * per_cut;
    }
    return gamma;
}

std::uint64_t subexperiment_seed(const EvalMode &mode, std::size_t term,
                                 std::size_t index) noexcept {
    return splitmix64(splitmix64(mode.seed ^ splitmix64(term)) + index);
}

double cut_expectation(const qsim::Circuit &circuit, const qsim::PauliObservable &observable,
                       std::size_t max_width, const EvalMode &mode,
                       std::uint64_t memory_cap) {
    const CutPlan plan = find_cuts(circuit, max_width);
    double total = 0.0;
    for (std::size_t t = 0; t < observable.terms().size(); ++t) {
        const auto &term = observable.terms()[t];
        const auto exps = generate_subexperiments(
            circuit, plan, qsim::PauliObservable({{1.0, term.paulis}}));
        std::map<FragmentValueKey, double> values;
        for (std::size_t i = 0; i < exps.subexperiments.size(); ++i) {
            const auto &sub = exps.subexperiments[i];
            const auto v = evaluate_variants(
                sub, {mode.shots, subexperiment_seed(mode, t, i)}, memory_cap);
            for (std::uint32_t m = 0; m < v.size(); ++m) {
                values[{i, m}] = v[m];
            }
        }
        total += term.coefficient * reconstruct(exps.terms, values);
    }
    return total;
}

WorkflowResult run_cut_workflow(PilotManager &manager, const qsim::Circuit &circuit,
                                const qsim::PauliObservable &observable,
                                const WorkflowOptions &options) {
    require(!observable.empty(), ErrorCode::UnsupportedObservable, "empty observable");
    const auto &clock = *manager.clock();
    WorkflowResult out;
    out.metrics.workload = "cut";
    const double t0 = clock.now();

    const CutPlan plan = find_cuts(circuit, options.max_width);
    std::vector<CutExperiments> per_term;
    for (const auto &term : observable.terms()) {
        per_term.push_back(generate_subexperiments(
            circuit, plan, qsim::PauliObservable({{1.0, term.paulis}})));
    }
    out.k = plan.k();
    const double t1 = clock.now();

    TaskDescription probe = TaskDescription::zero_compute(options.task_prefix + "-probe");
    probe.requires_qubits = static_cast<std::uint32_t>(plan.max_fragment_width());
    manager.require_feasible(probe);

    std::vector<std::string> ids;
    for (std::size_t t = 0; t < per_term.size(); ++t) {
        const auto &subs = per_term[t].subexperiments;
        for (std::size_t i = 0; i < subs.size(); ++i) {
            QuantumPayload p;
            p.circuit = subs[i].circuit;
            p.shots = options.mode.shots;
            p.seed = subexperiment_seed(options.mode, t, i);
            for (std::uint32_t m = 0; m < subs[i].identity_variants(); ++m) {
                p.observables.emplace_back(std::vector<qsim::PauliTerm>{subs[i].parity_term(m)});
            }
            ids.push_back(manager.submit_task(TaskDescription::quantum(
                options.task_prefix + "-t" + std::to_string(t) + "-s" + std::to_string(i),
                std::move(p))));
        }
    }
    out.subexperiments = ids.size();

    const WaitResult waited = manager.wait(ids, options.timeout_s);
    const double t2 = clock.now();
    out.metrics.tasks_total = ids.size();
    for (const auto &[id, r] : waited.records) {
        out.metrics.tasks_done += r.state == TaskState::Done;
        out.metrics.tasks_failed += r.state == TaskState::Failed;
        out.metrics.tasks_canceled += r.state == TaskState::Canceled;
    }
    require(waited.complete, ErrorCode::Internal, "subexperiment tasks timed out");
    for (const auto &id : ids) {
        const auto &r = waited.records.at(id);
        require(r.state == TaskState::Done, ErrorCode::Internal,
                "subexperiment " + id + " ended " + std::string(to_string(r.state)) +
                    (r.error ? ": " + *r.error : ""));
    }

    std::size_t next = 0;
    for (std::size_t t = 0; t < per_term.size(); ++t) {
        std::map<FragmentValueKey, double> values;
        for (std::size_t i = 0; i < per_term[t].subexperiments.size(); ++i) {
            const auto &exps = waited.records.at(ids[next++]).result->expectations;
            for (std::uint32_t m = 0; m < exps.size(); ++m) {
                values[{i, m}] = exps[m];
            }
        }
        out.value += observable.terms()[t].coefficient * reconstruct(per_term[t].terms, values);
    }
    const double t3 = clock.now();

    out.metrics.phases_s = {{"plan", t1 - t0}, {"execute", t2 - t1}, {"reconstruct", t3 - t2}};
    out.metrics.params = {{"k", std::to_string(out.k)},
                          {"subexperiments", std::to_string(out.subexperiments)},
                          {"max_width", std::to_string(options.max_width)},
                          {"shots", std::to_string(options.mode.shots)}};
    out.metrics.finish(t3 - t0);
    return out;
}

void to_json(nlohmann::json &j, const Fragment &f) {
    j = {{"qubits", f.qubits},
         {"width", f.width},
         {"incoming", f.incoming},
         {"outgoing", f.outgoing},
         {"gates", f.gates}};
}

void to_json(nlohmann::json &j, const Cut &c) {
    j = {{"qubit", c.qubit},
         {"source_fragment", c.source_fragment},
         {"source_wire", c.source_wire},
         {"dest_fragment", c.dest_fragment},
         {"dest_wire", c.dest_wire}};
}

void to_json(nlohmann::json &j, const CutPlan &p) {
    j = {{"num_qubits", p.num_qubits}, {"k", p.k()}, {"fragments", p.fragments},
         {"cuts", p.cuts}};
}

void to_json(nlohmann::json &j, const Subexperiment &s) {
    std::string bases;
    for (auto b : s.measure_settings) {
        bases += basis_letter(b);
    }
    std::vector<std::string> preps;
    for (auto p : s.prep_settings) {
        preps.emplace_back(prep_name(p));
    }
    j = {{"fragment_index", s.fragment_index},
         {"measure_settings", bases},
         {"prep_settings", preps},
         {"circuit", s.circuit}};
}

} // namespace pilotq::cut
