/*
 * Copyright 2026 The sortbo Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "sortbo/config.hpp"

#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <yaml-cpp/yaml.h>

namespace sortbo {

ConfigParseError::ConfigParseError(std::string key, const std::string& message)
    : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}

namespace {

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

void require_map(const YAML::Node& node, const std::string& path) {
    if (!node.IsMap()) throw ConfigParseError(path, "expected a mapping");
}

void reject_unknown(const YAML::Node& node, const std::string& path,
                    std::initializer_list<const char*> known) {
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        bool found = false;
        for (const char* k : known) found = found || key == k;
        if (!found) throw ConfigParseError(join(path, key), "unknown key");
    }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& path) {
    if (!node.IsScalar()) throw ConfigParseError(path, "expected a scalar");
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigParseError(path, "cannot parse '" + node.Scalar() + "'");
    }
}

template <typename T>
void read(const YAML::Node& map, const std::string& path, const char* key, T& out) {
    if (const auto node = map[key]) out = scalar<T>(node, join(path, key));
}

std::vector<double> read_list(const YAML::Node& node, const std::string& path) {
    if (!node.IsSequence()) throw ConfigParseError(path, "expected a list");
    std::vector<double> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
        out.push_back(scalar<double>(node[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

void read_range(const YAML::Node& map, const std::string& path, const char* key, Range& out) {
    const auto node = map[key];
    if (!node) return;
    const auto values = read_list(node, join(path, key));
    if (values.size() != 2) throw ConfigParseError(join(path, key), "expected [min, max]");
    out = {values[0], values[1]};
}

DesignGrid read_grid(const YAML::Node& node, const std::string& path, DesignGrid grid) {
    require_map(node, path);
    reject_unknown(node, path, {"reaction_lines", "extended_time", "extended_space"});
    auto dim = [&](const char* key, std::vector<double>& out) {
        if (const auto n = node[key]) {
            out = read_list(n, join(path, key));
            if (out.empty()) throw ConfigParseError(join(path, key), "must not be empty");
        }
    };
    dim("reaction_lines", grid.reaction_lines);
    dim("extended_time", grid.extended_time);
    dim("extended_space", grid.extended_space);
    return grid;
}

void read_simulator(const YAML::Node& node, SimulatorConfig& sim) {
    const std::string p = "simulator";
    require_map(node, p);
    reject_unknown(node, p,
                   {"line_frequency_hz", "nozzle_pitch_pixels", "nozzle_count", "belt_width_pixels",
                    "nozzle_delay_lines", "jitter_std_lines", "lateral_drift_std_pixels",
                    "valve_decay_lines", "true_transit_lines", "arrival_rate_accept",
                    "arrival_rate_reject", "object_length_lines", "object_width_pixels",
                    "hit_coverage_threshold", "seed"});
    read(node, p, "line_frequency_hz", sim.line_frequency_hz);
    read(node, p, "nozzle_pitch_pixels", sim.nozzle_pitch_pixels);
    read(node, p, "nozzle_count", sim.nozzle_count);
    read(node, p, "belt_width_pixels", sim.belt_width_pixels);
    read(node, p, "nozzle_delay_lines", sim.nozzle_delay_lines);
    read(node, p, "jitter_std_lines", sim.jitter_std_lines);
    read(node, p, "lateral_drift_std_pixels", sim.lateral_drift_std_pixels);
    read(node, p, "valve_decay_lines", sim.valve_decay_lines);
    read(node, p, "true_transit_lines", sim.true_transit_lines);
    read(node, p, "arrival_rate_accept", sim.arrival_rate_accept);
    read(node, p, "arrival_rate_reject", sim.arrival_rate_reject);
    read_range(node, p, "object_length_lines", sim.object_length_lines);
    read_range(node, p, "object_width_pixels", sim.object_width_pixels);
    read(node, p, "hit_coverage_threshold", sim.hit_coverage_threshold);
    read(node, p, "seed", sim.seed);
}

void read_optimizer(const YAML::Node& node, OptimizationConfig& opt) {
    const std::string p = "optimizer";
    require_map(node, p);
    reject_unknown(node, p,
                   {"initial_grid", "weights", "noise_weight", "search_margin", "max_steps",
                    "convergence_tol", "convergence_patience", "ei_floor"});
    if (const auto g = node["initial_grid"]) {
        opt.initial_design = build_initial_design(read_grid(g, join(p, "initial_grid"), default_initial_grid()));
    }
    if (const auto w = node["weights"]) {
        const auto values = read_list(w, join(p, "weights"));
        if (values.size() != 2) throw ConfigParseError(join(p, "weights"), "expected [w_accept, w_reject]");
        try {
            opt.weights = CombinedWeights(values[0], values[1]);
        } catch (const std::invalid_argument& e) {
            throw ConfigParseError(join(p, "weights"), e.what());
        }
    }
    read(node, p, "noise_weight", opt.noise_weight);
    read(node, p, "search_margin", opt.search_margin);
    read(node, p, "max_steps", opt.max_steps);
    read(node, p, "convergence_tol", opt.convergence_tol);
    read(node, p, "convergence_patience", opt.convergence_patience);
    read(node, p, "ei_floor", opt.ei_floor);
}

// Validation messages have the form "<section>.<field>: ...".
[[noreturn]] void rethrow_validation(const std::exception& e) {
    const std::string what = e.what();
    const auto colon = what.find(':');
    if (colon == std::string::npos) throw ConfigParseError("", what);
    const auto rest = what.substr(colon + 1);
    throw ConfigParseError(what.substr(0, colon), rest.empty() || rest[0] != ' ' ? rest : rest.substr(1));
}

}  // namespace

OptimizationConfig AppConfig::optimization() const {
    OptimizationConfig cfg = optimizer;
    cfg.duration_s = duration_s;
    cfg.interval_s = interval_s;
    cfg.workers = workers;
    return cfg;
}

AppConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigParseError("", std::string("malformed YAML: ") + e.what());
    }
    AppConfig cfg;
    if (root.IsNull()) return cfg;
    require_map(root, "<root>");
    reject_unknown(root, "", {"simulator", "experiment", "optimizer", "sweep", "workers"});
    if (const auto n = root["simulator"]) read_simulator(n, cfg.simulator);
    if (const auto n = root["experiment"]) {
        require_map(n, "experiment");
        reject_unknown(n, "experiment", {"duration_s", "interval_s"});
        read(n, "experiment", "duration_s", cfg.duration_s);
        read(n, "experiment", "interval_s", cfg.interval_s);
    }
    if (const auto n = root["optimizer"]) read_optimizer(n, cfg.optimizer);
    if (const auto n = root["sweep"]) {
        require_map(n, "sweep");
        reject_unknown(n, "sweep", {"grid"});
        if (const auto g = n["grid"]) cfg.sweep_grid = read_grid(g, "sweep.grid", cfg.sweep_grid);
    }
    if (const auto n = root["workers"]) {
        const auto w = scalar<long long>(n, "workers");
        if (w < 1) throw ConfigParseError("workers", "must be >= 1");
        cfg.workers = static_cast<std::size_t>(w);
    }

    try {
        cfg.simulator.validate();
        cfg.optimization().validate();
    } catch (const std::invalid_argument& e) {
        rethrow_validation(e);
    }
    return cfg;
}

AppConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigParseError("", "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace sortbo
