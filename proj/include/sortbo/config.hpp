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


#ifndef SORTBO_CONFIG_HPP
#define SORTBO_CONFIG_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

#include "sortbo/optimizer.hpp"
#include "sortbo/simulator.hpp"

namespace sortbo {

/// Raised for unreadable, malformed or out-of-range configuration. `key()`
/// is the dotted path of the offending entry, empty when the file itself is
/// at fault.
class ConfigParseError : public std::runtime_error {
public:
    ConfigParseError(std::string key, const std::string& message);
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// Everything a run reads from a configuration file. Missing keys keep their
/// defaults.
struct AppConfig {
    SimulatorConfig simulator;
    double duration_s = 300.0;
    double interval_s = 10.0;
    OptimizationConfig optimizer;
    DesignGrid sweep_grid = default_sweep_grid();
    std::size_t workers = 1;

    /// Copies the experiment and worker settings into `optimizer`.
    OptimizationConfig optimization() const;
};

AppConfig parse_config(const std::string& text);
AppConfig load_config(const std::string& path);

}  // namespace sortbo

#endif  // SORTBO_CONFIG_HPP
