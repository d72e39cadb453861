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

#include "sortbo/parameter_point.hpp"

#include <algorithm>
#include <cmath>

namespace sortbo {

double chebyshev_distance(const ParameterPoint& a, const ParameterPoint& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < kParameterDims; ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

bool is_valid(const ParameterPoint& p) {
    for (std::size_t i = 0; i < kParameterDims; ++i) {
        if (!std::isfinite(p[i]) || p[i] < 0.0) return false;
    }
    return true;
}

std::ostream& operator<<(std::ostream& os, const ParameterPoint& p) {
    return os << '(' << p.reaction_lines << ", " << p.extended_time << ", " << p.extended_space << ')';
}

}  // namespace sortbo
