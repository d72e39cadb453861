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

#ifndef SORTBO_LOCAL_SEARCH_HPP
#define SORTBO_LOCAL_SEARCH_HPP

#include <functional>
#include <span>
#include <vector>

namespace sortbo {

struct CompassOptions {
    /// Initial step as a fraction of each box width.
    double initial_step = 0.25;
    /// Search stops once every step is below this fraction of its width.
    double min_step = 1e-7;
    int max_evaluations = 2000;
};

struct CompassResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
};

/// Derivative-free bounded maximization by compass (coordinate pattern)
/// search. Only strict improvements move the incumbent, so a flat objective
/// returns the start point unchanged. Dimensions with zero width are fixed.
CompassResult compass_maximize(const std::function<double(std::span<const double>)>& objective,
                               std::vector<double> start, std::span<const double> lower,
                               std::span<const double> upper, const CompassOptions& options = {});

}  // namespace sortbo

#endif  // SORTBO_LOCAL_SEARCH_HPP
