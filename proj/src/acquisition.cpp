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

#include "sortbo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "sortbo/local_search.hpp"
#include "sortbo/parallel.hpp"

namespace sortbo {

namespace {

std::vector<double> axis_values(double lo, double hi, std::size_t count) {
    if (hi <= lo || count < 2) return {lo};
    std::vector<double> values(count);
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) values[i] = lo + step * static_cast<double>(i);
    values.back() = hi;
    return values;
}

// Larger value first, then lexicographically smaller point.
bool better(const Maximum& a, const Maximum& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.point < b.point;
}

}  // namespace

bool SearchSpace::contains(const ParameterPoint& p) const {
    for (std::size_t d = 0; d < kParameterDims; ++d) {
        if (p[d] < lower[d] || p[d] > upper[d]) return false;
    }
    return true;
}

bool SearchSpace::valid() const {
    for (std::size_t d = 0; d < kParameterDims; ++d) {
        if (!std::isfinite(lower[d]) || !std::isfinite(upper[d]) || lower[d] > upper[d]) return false;
    }
    return true;
}

CombinedWeights::CombinedWeights(double w_accept, double w_reject) : w_accept_(w_accept), w_reject_(w_reject) {
    if (!(w_accept >= 0.0 && w_accept <= 1.0 && w_reject >= 0.0 && w_reject <= 1.0)) {
        throw std::invalid_argument("weights must lie in [0, 1]");
    }
    if (std::abs(w_accept + w_reject - 1.0) > 1e-12) {
        throw std::invalid_argument("weights must sum to 1");
    }
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double expected_improvement(const Posterior& posterior, double f_best) {
    const double delta = posterior.mean - f_best;
    const double sigma = std::sqrt(std::max(0.0, posterior.variance));
    if (sigma == 0.0) return std::max(delta, 0.0);
    const double z = delta / sigma;
    return std::max(0.0, delta * normal_cdf(z) + sigma * normal_pdf(z));
}

double combined_ei(const ParameterPoint& x, const GprModel& model_accept, const GprModel& model_reject,
                   const AcquisitionState& state, const CombinedWeights& weights) {
    double value = 0.0;
    if (weights.accept() != 0.0) {
        value += weights.accept() * expected_improvement(model_accept.predict(x), state.best_accept);
    }
    if (weights.reject() != 0.0) {
        value += weights.reject() * expected_improvement(model_reject.predict(x), state.best_reject);
    }
    return value;
}

Maximum maximize_over_space(const std::function<double(const ParameterPoint&)>& objective,
                            const SearchSpace& space, const GridSearchOptions& options) {
    if (!space.valid()) throw std::invalid_argument("invalid search space");
    const auto xs = axis_values(space.lower[0], space.upper[0], options.points_per_dim);
    const auto ys = axis_values(space.lower[1], space.upper[1], options.points_per_dim);
    const auto zs = axis_values(space.lower[2], space.upper[2], options.points_per_dim);
    const std::size_t total = xs.size() * ys.size() * zs.size();

    // Index order is lexicographic in the point coordinates.
    std::vector<Maximum> grid(total);
    parallel_for(total, options.workers, [&](std::size_t i) {
        const std::size_t iz = i % zs.size();
        const std::size_t iy = (i / zs.size()) % ys.size();
        const std::size_t ix = i / (zs.size() * ys.size());
        grid[i].point = {xs[ix], ys[iy], zs[iz]};
        grid[i].value = objective(grid[i].point);
    });

    const std::size_t top = std::min(std::max<std::size_t>(1, options.refine_top), total);
    std::partial_sort(grid.begin(), grid.begin() + static_cast<std::ptrdiff_t>(top), grid.end(), better);

    const auto lo = space.lower.as_array();
    const auto hi = space.upper.as_array();
    CompassOptions copts;
    copts.initial_step = 1.0 / static_cast<double>(std::max<std::size_t>(2, options.points_per_dim) - 1);
    copts.min_step = 1e-9;
    copts.max_evaluations = 4000;
    auto wrapped = [&](std::span<const double> x) { return objective({x[0], x[1], x[2]}); };

    std::vector<Maximum> refined(top);
    parallel_for(top, options.workers, [&](std::size_t i) {
        const auto start = grid[i].point.as_array();
        const auto r = compass_maximize(wrapped, {start.begin(), start.end()}, lo, hi, copts);
        refined[i] = {{r.x[0], r.x[1], r.x[2]}, r.value};
    });

    Maximum best = grid.front();
    for (const auto& m : refined) {
        if (better(m, best)) best = m;
    }
    return best;
}

Maximum maximize_combined_ei(const GprModel& model_accept, const GprModel& model_reject,
                             const AcquisitionState& state, const CombinedWeights& weights,
                             const SearchSpace& space, const GridSearchOptions& options) {
    return maximize_over_space(
        [&](const ParameterPoint& x) { return combined_ei(x, model_accept, model_reject, state, weights); },
        space, options);
}

ParameterPoint round_to_actuation(const ParameterPoint& x, const SearchSpace& space) {
    ParameterPoint out;
    for (std::size_t d = 0; d < kParameterDims; ++d) {
        const double lo = std::ceil(space.lower[d]);
        const double hi = std::max(lo, std::floor(space.upper[d]));
        out[d] = std::clamp(std::round(x[d]), lo, hi);
    }
    return out;
}

}  // namespace sortbo
