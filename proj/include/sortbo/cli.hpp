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


#ifndef SORTBO_CLI_HPP
#define SORTBO_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sortbo/acquisition.hpp"
#include "sortbo/optimizer.hpp"

namespace sortbo {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// What a command reads and where it writes.
struct RunManifest {
    std::string config_path;
    std::string command;
    std::optional<std::uint64_t> seed_override;
    std::string output_dir = ".";
    bool force = false;
    std::optional<std::size_t> workers;
    std::optional<double> duration_s;
    std::optional<double> interval_s;
};

enum class ReportMode { variance_study, surface, ledger_csv };

struct ReportOptions {
    ReportMode mode = ReportMode::ledger_csv;
    /// "accept" or "reject"; used by the surface mode.
    std::string model = "accept";
    std::vector<double> lambdas{0.0, 0.01, 0.1, 1.0};
    int points_per_dim = 20;
    std::vector<double> times{5.0, 10.0, 20.0, 40.0};
};

/// Parsers for flag values; all throw std::invalid_argument.
CombinedWeights parse_weights(const std::string& text);   // "wa,wr"
ParameterPoint parse_params(const std::string& text);     // "tr,et,se"
/// Three '/'-separated dimensions, each "lo:hi", "lo:hi:step", or a
/// comma-separated value list, e.g. "12:21/0:8:2/0,8".
DesignGrid parse_grid(const std::string& text);
ReportMode parse_report_mode(const std::string& text);

/// Posterior surface of one model on a points_per_dim^3 grid spanning the
/// records, for each noise weight with hyperparameters fitted once at the
/// default weight. Columns: lambda, three parameters, mean, variance.
void write_posterior_surface(std::ostream& out, const std::vector<ExperimentRecord>& records,
                             const std::string& model, const std::vector<double>& lambdas,
                             int points_per_dim, std::size_t workers = 1);

int cmd_simulate(const RunManifest& manifest, const ParameterPoint& params, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunManifest& manifest, const std::optional<DesignGrid>& grid,
              const std::optional<CombinedWeights>& weights, std::ostream& out, std::ostream& err);
int cmd_optimize(const RunManifest& manifest, const std::optional<CombinedWeights>& weights, std::ostream& out,
                 std::ostream& err);
int cmd_report(const RunManifest& manifest, const ReportOptions& options, std::ostream& out, std::ostream& err);

/// Parses the command line and dispatches.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sortbo

#endif  // SORTBO_CLI_HPP
