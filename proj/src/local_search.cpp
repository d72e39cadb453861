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

#include "sortbo/local_search.hpp"

#include <algorithm>
#include <cstddef>

namespace sortbo {

CompassResult compass_maximize(const std::function<double(std::span<const double>)>& objective,
                               std::vector<double> start, std::span<const double> lower,
                               std::span<const double> upper, const CompassOptions& options) {
    const std::size_t dims = start.size();
    std::vector<double> step(dims);
    std::vector<double> min_step(dims);
    for (std::size_t d = 0; d < dims; ++d) {
        const double width = upper[d] - lower[d];
        step[d] = options.initial_step * width;
        min_step[d] = options.min_step * width;
        start[d] = std::clamp(start[d], lower[d], upper[d]);
    }

    CompassResult result;
    result.x = std::move(start);
    result.value = objective(result.x);
    result.evaluations = 1;

    std::vector<double> trial(dims);
    while (result.evaluations < options.max_evaluations) {
        bool any_active = false;
        bool improved = false;
        for (std::size_t d = 0; d < dims && result.evaluations < options.max_evaluations; ++d) {
            if (step[d] <= min_step[d] || step[d] == 0.0) continue;
            any_active = true;
            for (const double sign : {1.0, -1.0}) {
                trial = result.x;
                trial[d] = std::clamp(result.x[d] + sign * step[d], lower[d], upper[d]);
                if (trial[d] == result.x[d]) continue;
                const double value = objective(trial);
                ++result.evaluations;
                if (value > result.value) {
                    result.x = trial;
                    result.value = value;
                    improved = true;
                    break;
                }
                if (result.evaluations >= options.max_evaluations) break;
            }
        }
        if (!any_active) break;
        if (!improved) {
            for (auto& s : step) s *= 0.5;
        }
    }
    return result;
}

}  // namespace sortbo
