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
 * Desk-scale benchmark workloads behind the `pq` subcommands. Each one
 * drives a PilotManager and returns a CSV table plus RunMetrics.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "pilotq/manager.hpp"
#include "pilotq/metrics.hpp"
#include "pilotq/qsim/circuit.hpp"

namespace pilotq::bench {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    /// Columns excluded from rerun comparisons.
    std::set<std::string> timing_columns;

    [[nodiscard]] std::string to_csv() const;
    /// Same table with timing columns dropped.
    [[nodiscard]] std::string value_csv() const;
    void write(const std::filesystem::path &path) const;
};

struct Report {
    RunMetrics metrics;
    Table table;
};

/// Settings shared by every subcommand.
struct Common {
    std::optional<std::filesystem::path> out;
    std::optional<std::filesystem::path> log;
    std::uint64_t seed{7};
    std::uint64_t memory_cap_bytes{qsim::kDefaultMemoryCapBytes};
};

/// One clock and event log reused by every manager a command creates.
class Session {
  public:
    explicit Session(const Common &common);
    [[nodiscard]] ManagerOptions options(bool auto_schedule = true) const;
    [[nodiscard]] const Common &common() const noexcept { return common_; }
    [[nodiscard]] const std::shared_ptr<EventLog> &log() const noexcept { return log_; }

  private:
    Common common_;
    std::shared_ptr<Clock> clock_;
    std::shared_ptr<EventLog> log_;
};

struct ThroughputConfig {
    std::vector<std::size_t> tasks{256, 1024, 8192};
    std::size_t pilots{1};
    std::size_t workers{8};
};

struct CircuitsConfig {
    std::size_t qubits_min{2};
    std::size_t qubits_max{16};
    std::size_t qubits_step{2};
    std::size_t count{64};
    std::size_t depth{4};
    std::size_t shots{1024};
    std::vector<std::string> backends{"local", "qpu_sim"};
    std::size_t local_workers{1};
    std::size_t qpu_workers{8};
    double qpu_latency_s{0.2};
    double qpu_jitter_s{0.0};
};

struct GradientsConfig {
    std::size_t n_min{2};
    std::size_t n_max{12};
    std::size_t n_step{2};
    std::size_t layers{2};
    /// Finite differences are skipped above this width.
    std::size_t fd_max_qubits{12};
    double fd_step{1e-5};
};

struct CutConfig {
    std::vector<std::size_t> cluster_sizes{6, 6};
    std::size_t reps{1};
    /// 0 picks the widest cluster plus one incoming wire.
    std::size_t max_width{0};
    std::size_t shots{0};
    std::vector<std::size_t> workers{1, 4};
    std::string backend{"qpu_sim"};
    double qpu_latency_s{0.02};
    /// Empty means Z on every qubit.
    std::string observable;
};

struct VqcConfig {
    std::size_t n_qubits{4};
    std::size_t layers{2};
    std::size_t samples{200};
    std::size_t epochs{50};
    std::size_t batch_size{20};
    double learning_rate{0.1};
    std::string optimizer{"gd"};
    double momentum{0.9};
    /// Distance of each blob centre from the origin, per feature.
    double separation{0.8};
    double spread{0.35};
    std::size_t workers{2};
};

void from_json(const nlohmann::json &j, Common &c);
void from_json(const nlohmann::json &j, ThroughputConfig &c);
void from_json(const nlohmann::json &j, CircuitsConfig &c);
void from_json(const nlohmann::json &j, GradientsConfig &c);
void from_json(const nlohmann::json &j, CutConfig &c);
void from_json(const nlohmann::json &j, VqcConfig &c);

Report run_throughput(const ThroughputConfig &config, Session &session);
Report run_circuits(const CircuitsConfig &config, Session &session);
Report run_gradients(const GradientsConfig &config, Session &session);
Report run_cut(const CutConfig &config, Session &session);
Report run_vqc(const VqcConfig &config, Session &session);

/// Replays a JSONL log; NoActiveSession when it does not exist. Without a
/// path, the snapshot of a fresh manager.
nlohmann::json status(const std::optional<std::filesystem::path> &log);

/// Dispatches on `command` with a merged JSON config (common keys plus the
/// command's own), writes the CSV when "out" is set and returns
/// {"metrics", "csv", "timing_columns"}. Unknown keys are a ValidationError.
nlohmann::json run_command(const std::string &command, const nlohmann::json &config);

/// Median gap between consecutive task starts, in seconds.
double median_dispatch_interval(const std::vector<EventRecord> &events,
                                const std::string &task_prefix);

// VQC pieces, exposed for tests.

struct Dataset {
    std::vector<std::vector<double>> features;
    std::vector<int> labels;
};

/// Two Gaussian blobs centred at -separation and +separation on every axis.
Dataset make_blobs(std::size_t samples, std::size_t dim, double separation, double spread,
                   std::uint64_t seed);

/// RY(x_q) on every qubit, then the trainable entangling layers.
qsim::Circuit vqc_circuit(const std::vector<double> &features, std::size_t layers,
                          const std::vector<double> &theta);

struct BatchGradient {
    double loss_sum{0.0};
    std::size_t correct{0};
    std::size_t count{0};
    /// Gradient of loss_sum.
    std::vector<double> gradient;
};

/// Turns a "qsim.jacobian" result into summed cross-entropy loss and its
/// gradient; logits are <Z_0>, <Z_1>.
BatchGradient vqc_batch_from_jacobian(const nlohmann::json &result,
                                      const std::vector<int> &labels,
                                      std::size_t num_params);

/// Arguments for a "qsim.jacobian" task over `indices`.
nlohmann::json vqc_task_args(const Dataset &data, const std::vector<std::size_t> &indices,
                             std::size_t layers, const std::vector<double> &theta,
                             std::uint64_t memory_cap);

/// Evaluates every batch through `manager` (one task each) at `theta`.
std::vector<BatchGradient> vqc_batches(PilotManager &manager, const Dataset &data,
                                       const std::vector<std::vector<std::size_t>> &batches,
                                       std::size_t layers, const std::vector<double> &theta,
                                       const std::string &id_prefix);

} // namespace pilotq::bench
