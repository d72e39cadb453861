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

#ifndef SORTBO_SIMULATOR_HPP
#define SORTBO_SIMULATOR_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sortbo/metrics.hpp"
#include "sortbo/parameter_point.hpp"

namespace sortbo {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Range {
    double min = 0.0;
    double max = 0.0;
};

/// The virtual sorting plant. Time is measured in camera lines (one line of
/// belt travel per line period), space across the belt in pixels.
struct SimulatorConfig {
    double line_frequency_hz = 250.0;
    double nozzle_pitch_pixels = 8.0;
    int nozzle_count = 32;
    int belt_width_pixels = 256;
    double nozzle_delay_lines = 1.5;
    double jitter_std_lines = 0.7;
    /// Lateral displacement between the inspection line and the nozzle bar.
    double lateral_drift_std_pixels = 3.0;
    /// Blast pressure of an open valve decays as exp(-open_time / decay);
    /// 0 disables the decay.
    double valve_decay_lines = 15.0;
    double true_transit_lines = 13.5;
    double arrival_rate_accept = 32.0;
    double arrival_rate_reject = 8.0;
    Range object_length_lines{6.0, 14.0};
    Range object_width_pixels{8.0, 24.0};
    double hit_coverage_threshold = 0.5;
    std::uint64_t seed = 42;

    /// Throws ConfigError naming the first invalid field.
    void validate() const;
};

enum class ObjectClass { accept, reject };

struct BoundingBox {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct SimObject {
    ObjectClass class_label = ObjectClass::accept;
    BoundingBox bbox;
    std::int64_t arrival_line = 0;

    friend bool operator==(const SimObject&, const SimObject&) = default;
};

/// Grows the box by half of each extension on every side; the spatial
/// edges are clamped to [0, belt_width_pixels].
BoundingBox extend_bounding_box(const BoundingBox& bbox, const ParameterPoint& params, double belt_width_pixels);

/// Poisson arrivals of both classes over [0, duration_s), ordered by arrival
/// line. Fully determined by config.seed.
std::vector<SimObject> generate_stream(const SimulatorConfig& config, double duration_s);

/// T_R + nozzle delay + jitter, in lines.
double effective_reaction(const ParameterPoint& params, const SimulatorConfig& config, double jitter_draw);

/// Runs the stream through detection, delayed nozzle activation and the
/// coverage hit test; returns one confusion matrix per interval.
///
/// Every reject object opens the nozzles whose centers fall inside its
/// extended box, for lines [y_min_ext + T_R, y_max_ext + T_R]. An object
/// reaches the nozzle bar displaced by the true transit, the nozzle delay and
/// a per-object jitter (plus a lateral drift) and is ejected when the union
/// of activations, weighted by the decaying valve pressure, covers at least
/// hit_coverage_threshold of its footprint.
/// Objects are bucketed by the line their footprint reaches the nozzle bar;
/// those not completely inside the experiment are not counted.
std::vector<IntervalResult> run_experiment(const SimulatorConfig& config, const ParameterPoint& params,
                                           double duration_s, double interval_s);

/// Deterministic 64-bit seed derived from a base seed and a stream index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace sortbo

#endif  // SORTBO_SIMULATOR_HPP
