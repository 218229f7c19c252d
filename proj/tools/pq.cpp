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

// pq: benchmark driver over the pilotq C API.
//
//   pq cut --clusters 6,6 --workers 1,4 --out cut.csv --log cut.jsonl
//   pq status --log cut.jsonl
//
// Settings resolve as flags > --config JSON > built-in defaults. A config
// file may hold common keys at the top level and per-command objects under
// the command name, e.g. {"seed": 3, "cut": {"reps": 2}}.

#include <algorithm>
#include <cstdio>
#include <functional>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "pilotq/pq.h"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

const char *const kCommands[] = {"throughput", "circuits", "gradients", "cut", "vqc", "status"};

struct Common {
    std::string out;
    std::string log;
    std::string config;
};

// Flags that were given on the command line, keyed by config name.
class Overrides {
  public:
    template <class T>
    CLI::Option *add(CLI::App *app, const std::string &flag, const std::string &key,
                     const std::string &help) {
        auto holder = std::make_shared<T>();
        auto *opt = app->add_option(flag, *holder, help);
        if constexpr (std::is_same_v<T, std::vector<std::size_t>> ||
                      std::is_same_v<T, std::vector<std::string>>) {
            opt->delimiter(',');
        }
        setters_.push_back([opt, holder, key](json &cfg) {
            if (opt->count() > 0) {
                cfg[key] = *holder;
            }
        });
        return opt;
    }

    void apply(json &cfg) const {
        for (const auto &s : setters_) {
            s(cfg);
        }
    }

  private:
    std::vector<std::function<void(json &)>> setters_;
};

int status_exit(pq_status s) {
    if (s == PQ_OK) {
        return kExitOk;
    }
    std::cerr << "pq: " << pq_last_error() << "\n";
    return pq_status_is_validation(s) ? kExitValidation : kExitRuntime;
}

json load_config(const std::string &path, const std::string &command) {
    std::ifstream f(path);
    if (!f) {
        throw std::runtime_error("cannot read config " + path);
    }
    json file;
    try {
        file = json::parse(f);
    } catch (const json::exception &e) {
        throw std::invalid_argument("config " + path + ": " + e.what());
    }
    if (!file.is_object()) {
        throw std::invalid_argument("config " + path + " must be a JSON object");
    }
    json cfg = json::object();
    for (const auto &[key, value] : file.items()) {
        const bool is_section =
            std::find(std::begin(kCommands), std::end(kCommands), key) != std::end(kCommands);
        if (!is_section) {
            cfg[key] = value;
        }
    }
    if (file.contains(command)) {
        for (const auto &[key, value] : file.at(command).items()) {
            cfg[key] = value;
        }
    }
    return cfg;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"pilotq benchmark harness"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(pq_version()));

    Common common;
    std::map<std::string, Overrides> overrides;
    std::map<std::string, CLI::App *> subs;

    const auto add_common = [&](CLI::App *sub, Overrides &ov) {
        sub->add_option("--out", common.out, "CSV output path");
        sub->add_option("--log", common.log, "JSONL event log path");
        sub->add_option("--config", common.config, "JSON config file");
        ov.add<std::uint64_t>(sub, "--seed", "seed", "RNG seed");
        ov.add<double>(sub, "--memory-cap-mb", "memory_cap_mb", "state-vector memory cap");
    };

    {
        auto *s = subs["throughput"] = app.add_subcommand("throughput", "zero-compute task throughput");
        auto &ov = overrides["throughput"];
        add_common(s, ov);
        ov.add<std::vector<std::size_t>>(s, "--tasks", "tasks", "task counts, comma separated");
        ov.add<std::size_t>(s, "--pilots", "pilots", "local pilots");
        ov.add<std::size_t>(s, "--workers", "workers", "workers per pilot");
    }
    {
        auto *s = subs["circuits"] = app.add_subcommand("circuits", "random circuit execution times");
        auto &ov = overrides["circuits"];
        add_common(s, ov);
        ov.add<std::size_t>(s, "--qubits-min", "qubits_min", "smallest width");
        ov.add<std::size_t>(s, "--qubits-max", "qubits_max", "largest width");
        ov.add<std::size_t>(s, "--qubits-step", "qubits_step", "width step");
        ov.add<std::size_t>(s, "--count", "count", "circuits per width");
        ov.add<std::size_t>(s, "--depth", "depth", "random circuit layers");
        ov.add<std::size_t>(s, "--shots", "shots", "shots per circuit");
        ov.add<std::vector<std::string>>(s, "--backends", "backends", "local,qpu_sim");
        ov.add<std::size_t>(s, "--local-workers", "local_workers", "simulator pilot workers");
        ov.add<std::size_t>(s, "--qpu-workers", "qpu_workers", "QPU pilot workers");
        ov.add<double>(s, "--latency", "qpu_latency_s", "QPU per-task latency (s)");
        ov.add<double>(s, "--jitter", "qpu_jitter_s", "QPU queue jitter (s)");
    }
    {
        auto *s = subs["gradients"] = app.add_subcommand("gradients", "expectation vs adjoint gradient");
        auto &ov = overrides["gradients"];
        add_common(s, ov);
        ov.add<std::size_t>(s, "--n-min", "n_min", "smallest width");
        ov.add<std::size_t>(s, "--n-max", "n_max", "largest width");
        ov.add<std::size_t>(s, "--n-step", "n_step", "width step");
        ov.add<std::size_t>(s, "--layers", "layers", "entangling layers");
        ov.add<std::size_t>(s, "--fd-max-qubits", "fd_max_qubits",
                            "skip the finite-difference check above this width");
    }
    {
        auto *s = subs["cut"] = app.add_subcommand("cut", "wire-cutting workflow");
        auto &ov = overrides["cut"];
        add_common(s, ov);
        ov.add<std::vector<std::size_t>>(s, "--clusters", "cluster_sizes", "cluster sizes, e.g. 6,6");
        ov.add<std::size_t>(s, "--reps", "reps", "ansatz repetitions per cluster");
        ov.add<std::size_t>(s, "--max-width", "max_width", "widest fragment allowed");
        ov.add<std::size_t>(s, "--shots", "shots", "0 = exact");
        ov.add<std::vector<std::size_t>>(s, "--workers", "workers", "worker counts, e.g. 1,4");
        ov.add<std::string>(s, "--backend", "backend", "local or qpu_sim");
        ov.add<double>(s, "--latency", "qpu_latency_s", "QPU per-task latency (s)");
        ov.add<std::string>(s, "--observable", "observable", "Pauli string, qubit 0 first");
    }
    {
        auto *s = subs["vqc"] = app.add_subcommand("vqc", "variational classifier training");
        auto &ov = overrides["vqc"];
        add_common(s, ov);
        ov.add<std::size_t>(s, "--qubits", "n_qubits", "qubits = features");
        ov.add<std::size_t>(s, "--layers", "layers", "entangling layers");
        ov.add<std::size_t>(s, "--samples", "samples", "dataset size");
        ov.add<std::size_t>(s, "--epochs", "epochs", "training epochs");
        ov.add<std::size_t>(s, "--batch-size", "batch_size", "mini-batch size");
        ov.add<double>(s, "--lr", "learning_rate", "step size");
        ov.add<std::string>(s, "--optimizer", "optimizer", "gd or momentum");
        ov.add<double>(s, "--momentum", "momentum", "momentum coefficient");
        ov.add<std::size_t>(s, "--workers", "workers", "pilot workers");
    }
    {
        auto *s = subs["status"] = app.add_subcommand(
            "status", "snapshot from an event log (or of an empty session)");
        s->add_option("--log", common.log, "JSONL event log path");
        s->add_option("--config", common.config, "JSON config file");
        overrides["status"];
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    std::string command;
    for (const auto &[name, sub] : subs) {
        if (sub->parsed()) {
            command = name;
        }
    }

    json cfg = json::object();
    try {
        if (!common.config.empty()) {
            cfg = load_config(common.config, command);
        }
    } catch (const std::invalid_argument &e) {
        std::cerr << "pq: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception &e) {
        std::cerr << "pq: " << e.what() << "\n";
        return kExitRuntime;
    }
    overrides[command].apply(cfg);
    if (!common.out.empty()) {
        cfg["out"] = common.out;
    }
    if (!common.log.empty()) {
        cfg["log"] = common.log;
    }

    if (command == "status") {
        char *snapshot = nullptr;
        pq_status s = PQ_OK;
        if (cfg.contains("log")) {
            s = pq_status_from_log(cfg["log"].get<std::string>().c_str(), &snapshot);
        } else {
            pq_manager *m = nullptr;
            s = pq_manager_create(nullptr, &m);
            if (s == PQ_OK) {
                s = pq_manager_status(m, &snapshot);
                pq_manager_destroy(m);
            }
        }
        if (s != PQ_OK) {
            return status_exit(s);
        }
        std::cout << snapshot << "\n";
        pq_free_string(snapshot);
        return kExitOk;
    }

    char *report = nullptr;
    const pq_status s = pq_run_workload(command.c_str(), cfg.dump().c_str(), &report);
    if (s != PQ_OK) {
        return status_exit(s);
    }
    const json r = json::parse(report);
    pq_free_string(report);
    if (cfg.contains("out")) {
        std::cout << r.at("metrics").dump() << "\n";
    } else {
        std::cout << r.at("csv").get<std::string>();
    }
    return kExitOk;
}
