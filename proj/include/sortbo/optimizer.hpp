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

#ifndef SORTBO_OPTIMIZER_HPP
#define SORTBO_OPTIMIZER_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "sortbo/acquisition.hpp"
#include "sortbo/gpr.hpp"
#include "sortbo/metrics.hpp"
#include "sortbo/simulator.hpp"

namespace sortbo {

class PlantError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultNoiseWeight = 0.1;

/// Per-dimension candidate values of a Cartesian design.
struct DesignGrid {
    std::vector<double> reaction_lines;
    std::vector<double> extended_time;
    std::vector<double> extended_space;
};

/// The grid of the initial experiments: {12, 18, 21} x {0, 8} x {0, 8}.
DesignGrid default_initial_grid();
/// The exhaustive grid: 12..21 x {0, 2, 4, 6, 8} x {0, 2, 4, 6, 8}.
DesignGrid default_sweep_grid();

std::vector<ParameterPoint> build_initial_design(const DesignGrid& grid);

struct OptimizationConfig {
    std::vector<ParameterPoint> initial_design = build_initial_design(default_initial_grid());
    CombinedWeights weights{0.5, 0.5};
    double noise_weight = kDefaultNoiseWeight;
    double search_margin = 1.0;
    int max_steps = 15;
    double convergence_tol = 1.0;
    int convergence_patience = 2;
    double ei_floor = 1e-4;
    double duration_s = 300.0;
    double interval_s = 10.0;
    std::size_t workers = 1;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

struct Proposal {
    int step = 0;
    ParameterPoint raw;
    ParameterPoint actuated;
    double combined_ei_value = 0.0;
};

struct FailureEntry {
    int step = 0;
    ParameterPoint params;
    std::string message;
};

using LedgerEntry = std::variant<ExperimentRecord, Proposal, FailureEntry>;

/// Append-only history of an optimization run, in event order.
class Ledger {
public:
    void append(ExperimentRecord record);
    /// Throws std::logic_error unless the step index increases.
    void append(Proposal proposal);
    void append(FailureEntry failure);

    const std::vector<ExperimentRecord>& records() const { return records_; }
    const std::vector<Proposal>& proposals() const { return proposals_; }
    const std::vector<FailureEntry>& failures() const { return failures_; }
    const std::vector<LedgerEntry>& entries() const { return entries_; }

private:
    std::vector<ExperimentRecord> records_;
    std::vector<Proposal> proposals_;
    std::vector<FailureEntry> failures_;
    std::vector<LedgerEntry> entries_;
};

/// Something that performs a sorting experiment at given parameters.
/// `ordinal` is the number of experiments already performed in the run.
class ExperimentExecutor {
public:
    virtual ~ExperimentExecutor() = default;
    virtual ExperimentRecord execute(const ParameterPoint& params, std::size_t ordinal) = 0;
};

/// Runs the virtual plant. Experiment `ordinal` uses a seed derived from the
/// configured seed so repeated parameters see fresh noise, and is stamped
/// with its virtual completion time.
class SimulatorPlant : public ExperimentExecutor {
public:
    SimulatorPlant(SimulatorConfig config, double duration_s, double interval_s);
    ExperimentRecord execute(const ParameterPoint& params, std::size_t ordinal) override;

    const SimulatorConfig& config() const { return config_; }

private:
    SimulatorConfig config_;
    double duration_s_;
    double interval_s_;
};

/// Serves prior records. The k-th request for a parameter point returns the
/// k-th stored record with those parameters (cycling when exhausted).
class ReplayPlant : public ExperimentExecutor {
public:
    explicit ReplayPlant(std::vector<ExperimentRecord> records);
    ExperimentRecord execute(const ParameterPoint& params, std::size_t ordinal) override;

private:
    std::vector<ExperimentRecord> records_;
    std::vector<std::pair<ParameterPoint, std::size_t>> served_;
};

SearchSpace derive_search_space(const std::vector<ParameterPoint>& design, double margin);

/// Kernel start point for a search space: unit signal variance and length
/// scales equal to the space widths.
KernelParams initial_kernel(const SearchSpace& space);

/// Observations of one objective: normalized TP when `accept`, else
/// normalized TN, with the interval variances as per-point noise.
TrainingSet training_set(const std::vector<ExperimentRecord>& records, double noise_weight, bool accept);

struct SurrogatePair {
    GprModel accept;
    GprModel reject;
};

/// Fits the accept (normalized TP) and reject (normalized TN) models with
/// lambda-weighted interval variances as per-point noise.
SurrogatePair fit_surrogates(const std::vector<ExperimentRecord>& records, double noise_weight,
                             const SearchSpace& space, std::size_t workers = 1);

AcquisitionState acquisition_state(const std::vector<ExperimentRecord>& records);

/// One pass of fit, acquisition maximization, rounding and experiment. The
/// proposal is logged before the experiment runs; a failing plant leaves a
/// failure entry and rethrows.
Proposal step(Ledger& ledger, const OptimizationConfig& cfg, ExperimentExecutor& plant);

enum class RunStatus { converged_stable, converged_ei_floor, budget_exhausted };

std::string to_string(RunStatus status);

struct RunResult {
    Ledger ledger;
    ParameterPoint best;
    RunStatus status = RunStatus::budget_exhausted;
    int steps = 0;
};

/// Index of the record with the largest weighted observed mean.
std::size_t best_record_index(const std::vector<ExperimentRecord>& records, const CombinedWeights& weights);

/// Initial design followed by steps until the proposals stabilize, the
/// maximal combined EI drops below the floor, or max_steps is reached.
RunResult run(const OptimizationConfig& cfg, ExperimentExecutor& plant);

/// Continuous arg max of the weighted posterior means of models fitted on
/// all records, over the bounding box of the records unless a space is given.
Maximum reference_best(const std::vector<ExperimentRecord>& records, const CombinedWeights& weights,
                       const std::optional<SearchSpace>& space = std::nullopt, std::size_t workers = 1);

}  // namespace sortbo

#endif  // SORTBO_OPTIMIZER_HPP
