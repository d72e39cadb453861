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

#ifndef SORTBO_ACQUISITION_HPP
#define SORTBO_ACQUISITION_HPP

#include <cstddef>
#include <functional>

#include "sortbo/gpr.hpp"
#include "sortbo/parameter_point.hpp"

namespace sortbo {

struct SearchSpace {
    ParameterPoint lower;
    ParameterPoint upper;

    bool contains(const ParameterPoint& p) const;
    bool valid() const;
};

/// Convex weights over the accept and reject objectives.
class CombinedWeights {
public:
    /// Throws std::invalid_argument unless both weights lie in [0, 1] and
    /// sum to 1 within 1e-12.
    CombinedWeights(double w_accept, double w_reject);

    double accept() const { return w_accept_; }
    double reject() const { return w_reject_; }

private:
    double w_accept_;
    double w_reject_;
};

/// Best observed per-experiment means of each objective.
struct AcquisitionState {
    double best_accept = 0.0;
    double best_reject = 0.0;
};

struct GridSearchOptions {
    std::size_t points_per_dim = 32;
    std::size_t refine_top = 5;
    std::size_t workers = 1;
};

struct Maximum {
    ParameterPoint point;
    double value = 0.0;
};

double normal_pdf(double z);
double normal_cdf(double z);

/// Expected improvement for maximization: E[max(f - f_best, 0)].
double expected_improvement(const Posterior& posterior, double f_best);

/// w_accept * EI_accept + w_reject * EI_reject. A zero-weighted model is not
/// evaluated.
double combined_ei(const ParameterPoint& x, const GprModel& model_accept, const GprModel& model_reject,
                   const AcquisitionState& state, const CombinedWeights& weights);

/// Grid seed followed by compass refinement of the best grid cells. The grid
/// is evaluated in parallel but the result is independent of the worker
/// count; exact ties go to the lexicographically smallest point.
Maximum maximize_over_space(const std::function<double(const ParameterPoint&)>& objective,
                            const SearchSpace& space, const GridSearchOptions& options = {});

Maximum maximize_combined_ei(const GprModel& model_accept, const GprModel& model_reject,
                             const AcquisitionState& state, const CombinedWeights& weights,
                             const SearchSpace& space, const GridSearchOptions& options = {});

/// Nearest integer per coordinate (halves away from zero), clamped into the
/// integer points of the space.
ParameterPoint round_to_actuation(const ParameterPoint& x, const SearchSpace& space);

}  // namespace sortbo

#endif  // SORTBO_ACQUISITION_HPP
