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

#include "sortbo/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace sortbo {

namespace {

double weighted_score(const ExperimentRecord& r, const CombinedWeights& w) {
    return w.accept() * r.tp_n_mean + w.reject() * r.tn_n_mean;
}

}  // namespace

KernelParams initial_kernel(const SearchSpace& space) {
    KernelParams k;
    for (std::size_t d = 0; d < kParameterDims; ++d) {
        const double width = space.upper[d] - space.lower[d];
        k.length_scales[d] = width > 0.0 ? width : 1.0;
    }
    return k;
}

TrainingSet training_set(const std::vector<ExperimentRecord>& records, double noise_weight, bool accept) {
    TrainingSet t;
    t.noise_weight = noise_weight;
    for (const auto& r : records) {
        t.inputs.push_back(r.params);
        t.targets.push_back(accept ? r.tp_n_mean : r.tn_n_mean);
        t.noise_variances.push_back(accept ? r.tp_n_var : r.tn_n_var);
    }
    return t;
}

DesignGrid default_initial_grid() { return {{12, 18, 21}, {0, 8}, {0, 8}}; }

DesignGrid default_sweep_grid() {
    return {{12, 13, 14, 15, 16, 17, 18, 19, 20, 21}, {0, 2, 4, 6, 8}, {0, 2, 4, 6, 8}};
}

void OptimizationConfig::validate() const {
    if (initial_design.empty()) throw std::invalid_argument("optimizer.initial_design: must not be empty");
    bool spread = false;
    for (std::size_t d = 0; d < kParameterDims && !spread; ++d) {
        for (const auto& p : initial_design) {
            if (p[d] != initial_design.front()[d]) {
                spread = true;
                break;
            }
        }
    }
    if (!spread) throw std::invalid_argument("optimizer.initial_design: needs two distinct values in some dimension");
    for (const auto& p : initial_design) {
        if (!is_valid(p)) throw std::invalid_argument("optimizer.initial_design: parameters must be finite and >= 0");
    }
    if (!(noise_weight >= 0.0)) throw std::invalid_argument("optimizer.noise_weight: must be >= 0");
    if (!(search_margin >= 0.0)) throw std::invalid_argument("optimizer.search_margin: must be >= 0");
    if (max_steps < 0) throw std::invalid_argument("optimizer.max_steps: must be >= 0");
    if (!(convergence_tol > 0.0)) throw std::invalid_argument("optimizer.convergence_tol: must be > 0");
    if (convergence_patience < 1) throw std::invalid_argument("optimizer.convergence_patience: must be >= 1");
    if (!(ei_floor >= 0.0)) throw std::invalid_argument("optimizer.ei_floor: must be >= 0");
    if (!(duration_s > 0.0) || !(interval_s > 0.0)) {
        throw std::invalid_argument("experiment.duration_s/interval_s: must be > 0");
    }
    const double ratio = duration_s / interval_s;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
        throw std::invalid_argument("experiment.interval_s: must divide duration_s");
    }
}

void Ledger::append(ExperimentRecord record) {
    records_.push_back(record);
    entries_.emplace_back(std::move(record));
}

void Ledger::append(Proposal proposal) {
    if (!proposals_.empty() && proposal.step <= proposals_.back().step) {
        throw std::logic_error("proposal steps must increase");
    }
    proposals_.push_back(proposal);
    entries_.emplace_back(std::move(proposal));
}

void Ledger::append(FailureEntry failure) {
    failures_.push_back(failure);
    entries_.emplace_back(std::move(failure));
}

SimulatorPlant::SimulatorPlant(SimulatorConfig config, double duration_s, double interval_s)
    : config_(std::move(config)), duration_s_(duration_s), interval_s_(interval_s) {
    config_.validate();
}

ExperimentRecord SimulatorPlant::execute(const ParameterPoint& params, std::size_t ordinal) {
    SimulatorConfig cfg = config_;
    cfg.seed = derive_seed(config_.seed, ordinal);
    auto record = aggregate_experiment(params, run_experiment(cfg, params, duration_s_, interval_s_));
    record.timestamp = static_cast<double>(ordinal + 1) * duration_s_;
    return record;
}

ReplayPlant::ReplayPlant(std::vector<ExperimentRecord> records) : records_(std::move(records)) {}

ExperimentRecord ReplayPlant::execute(const ParameterPoint& params, std::size_t /*ordinal*/) {
    std::vector<std::size_t> matches;
    for (std::size_t i = 0; i < records_.size(); ++i) {
        if (records_[i].params == params) matches.push_back(i);
    }
    if (matches.empty()) {
        std::ostringstream msg;
        msg << "replay ledger has no record for " << params;
        throw PlantError(msg.str());
    }
    auto it = std::find_if(served_.begin(), served_.end(), [&](const auto& s) { return s.first == params; });
    if (it == served_.end()) {
        served_.emplace_back(params, 0);
        it = served_.end() - 1;
    }
    return records_[matches[it->second++ % matches.size()]];
}

std::vector<ParameterPoint> build_initial_design(const DesignGrid& grid) {
    std::vector<ParameterPoint> design;
    for (double tr : grid.reaction_lines) {
        for (double et : grid.extended_time) {
            for (double se : grid.extended_space) design.push_back({tr, et, se});
        }
    }
    return design;
}

SearchSpace derive_search_space(const std::vector<ParameterPoint>& design, double margin) {
    if (design.empty()) throw std::invalid_argument("design must not be empty");
    SearchSpace space{design.front(), design.front()};
    for (const auto& p : design) {
        for (std::size_t d = 0; d < kParameterDims; ++d) {
            space.lower[d] = std::min(space.lower[d], p[d]);
            space.upper[d] = std::max(space.upper[d], p[d]);
        }
    }
    for (std::size_t d = 0; d < kParameterDims; ++d) {
        space.lower[d] = std::max(0.0, space.lower[d] - margin);
        space.upper[d] += margin;
    }
    return space;
}

SurrogatePair fit_surrogates(const std::vector<ExperimentRecord>& records, double noise_weight,
                             const SearchSpace& space, std::size_t workers) {
    const KernelParams init = initial_kernel(space);
    FitOptions options;
    options.workers = workers;
    return {fit(training_set(records, noise_weight, true), init, true, options),
            fit(training_set(records, noise_weight, false), init, true, options)};
}

AcquisitionState acquisition_state(const std::vector<ExperimentRecord>& records) {
    AcquisitionState state;
    for (const auto& r : records) {
        state.best_accept = std::max(state.best_accept, r.tp_n_mean);
        state.best_reject = std::max(state.best_reject, r.tn_n_mean);
    }
    return state;
}

Proposal step(Ledger& ledger, const OptimizationConfig& cfg, ExperimentExecutor& plant) {
    if (ledger.records().empty()) throw std::logic_error("step needs the initial design records");
    const SearchSpace space = derive_search_space(cfg.initial_design, cfg.search_margin);
    const SurrogatePair models = fit_surrogates(ledger.records(), cfg.noise_weight, space, cfg.workers);
    GridSearchOptions gopts;
    gopts.workers = cfg.workers;
    const Maximum next = maximize_combined_ei(models.accept, models.reject, acquisition_state(ledger.records()),
                                              cfg.weights, space, gopts);

    Proposal proposal;
    proposal.step = ledger.proposals().empty() ? 1 : ledger.proposals().back().step + 1;
    proposal.raw = next.point;
    proposal.actuated = round_to_actuation(next.point, space);
    proposal.combined_ei_value = next.value;
    ledger.append(proposal);

    try {
        ledger.append(plant.execute(proposal.actuated, ledger.records().size()));
    } catch (const std::exception& e) {
        ledger.append(FailureEntry{proposal.step, proposal.actuated, e.what()});
        throw;
    }
    return proposal;
}

std::string to_string(RunStatus status) {
    switch (status) {
        case RunStatus::converged_stable: return "converged (stable proposals)";
        case RunStatus::converged_ei_floor: return "converged (expected improvement below floor)";
        case RunStatus::budget_exhausted: return "budget exhausted";
    }
    return "unknown";
}

std::size_t best_record_index(const std::vector<ExperimentRecord>& records, const CombinedWeights& weights) {
    if (records.empty()) throw std::invalid_argument("no records");
    std::size_t best = 0;
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (weighted_score(records[i], weights) > weighted_score(records[best], weights)) best = i;
    }
    return best;
}

RunResult run(const OptimizationConfig& cfg, ExperimentExecutor& plant) {
    cfg.validate();
    RunResult result;
    for (const auto& p : cfg.initial_design) {
        result.ledger.append(plant.execute(p, result.ledger.records().size()));
    }

    int stable = 0;
    while (result.steps < cfg.max_steps) {
        const Proposal proposal = step(result.ledger, cfg, plant);
        ++result.steps;
        const auto& proposals = result.ledger.proposals();
        if (proposals.size() >= 2 &&
            chebyshev_distance(proposal.actuated, proposals[proposals.size() - 2].actuated) < cfg.convergence_tol) {
            ++stable;
        } else {
            stable = 0;
        }
        if (stable >= cfg.convergence_patience) {
            result.status = RunStatus::converged_stable;
            break;
        }
        if (proposal.combined_ei_value < cfg.ei_floor) {
            result.status = RunStatus::converged_ei_floor;
            break;
        }
    }
    result.best = result.ledger.records()[best_record_index(result.ledger.records(), cfg.weights)].params;
    return result;
}

Maximum reference_best(const std::vector<ExperimentRecord>& records, const CombinedWeights& weights,
                       const std::optional<SearchSpace>& space, std::size_t workers) {
    if (records.empty()) throw std::invalid_argument("reference_best needs records");
    std::vector<ParameterPoint> params;
    for (const auto& r : records) params.push_back(r.params);
    const SearchSpace box = space ? *space : derive_search_space(params, 0.0);
    const SurrogatePair models = fit_surrogates(records, kDefaultNoiseWeight, box, workers);
    GridSearchOptions gopts;
    gopts.workers = workers;
    return maximize_over_space(
        [&](const ParameterPoint& x) {
            double v = 0.0;
            if (weights.accept() != 0.0) v += weights.accept() * models.accept.predict_mean(x);
            if (weights.reject() != 0.0) v += weights.reject() * models.reject.predict_mean(x);
            return v;
        },
        box, gopts);
}

}  // namespace sortbo
