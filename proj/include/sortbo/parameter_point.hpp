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

#ifndef SORTBO_PARAMETER_POINT_HPP
#define SORTBO_PARAMETER_POINT_HPP

#include <array>
#include <compare>
#include <cstddef>
#include <ostream>

namespace sortbo {

inline constexpr std::size_t kParameterDims = 3;

/// A process-parameter configuration of the sorter.
///
/// reaction_lines and extended_time are in camera lines, extended_space in
/// pixels. Ordering is lexicographic in (reaction_lines, extended_time,
/// extended_space), which is the tie-break order used by every search.
struct ParameterPoint {
    double reaction_lines = 0.0;
    double extended_time = 0.0;
    double extended_space = 0.0;

    constexpr double operator[](std::size_t dim) const {
        return dim == 0 ? reaction_lines : dim == 1 ? extended_time : extended_space;
    }
    constexpr double& operator[](std::size_t dim) {
        return dim == 0 ? reaction_lines : dim == 1 ? extended_time : extended_space;
    }

    constexpr std::array<double, kParameterDims> as_array() const {
        return {reaction_lines, extended_time, extended_space};
    }
    static constexpr ParameterPoint from_array(const std::array<double, kParameterDims>& a) {
        return {a[0], a[1], a[2]};
    }

    friend constexpr auto operator<=>(const ParameterPoint&, const ParameterPoint&) = default;
};

/// Largest per-coordinate absolute difference.
double chebyshev_distance(const ParameterPoint& a, const ParameterPoint& b);

/// True when every coordinate is finite and non-negative.
bool is_valid(const ParameterPoint& p);

std::ostream& operator<<(std::ostream& os, const ParameterPoint& p);

}  // namespace sortbo

#endif  // SORTBO_PARAMETER_POINT_HPP
