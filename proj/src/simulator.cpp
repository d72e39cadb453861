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

#include "sortbo/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <tuple>
#include <utility>

namespace sortbo {

namespace {

constexpr std::uint64_t kAcceptStreamTag = 0xACCE97ULL;
constexpr std::uint64_t kRejectStreamTag = 0x4E1EC7ULL;
constexpr std::uint64_t kObjectDrawTag = 0xD1CEULL;

using Window = std::pair<double, double>;

void require(bool ok, const char* field, const std::string& what) {
    if (!ok) throw ConfigError(std::string("simulator.") + field + ": " + what);
}

double draw_in(const Range& r, double u01) { return r.min + (r.max - r.min) * u01; }

void append_class(std::vector<SimObject>& out, const SimulatorConfig& config, double duration_s,
                  ObjectClass label, double rate, std::uint64_t tag) {
    if (rate <= 0.0) return;
    std::mt19937_64 rng(derive_seed(config.seed, tag));
    std::exponential_distribution<double> gap(rate);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double belt = static_cast<double>(config.belt_width_pixels);
    for (double t = gap(rng); t < duration_s; t += gap(rng)) {
        SimObject obj;
        obj.class_label = label;
        obj.arrival_line = static_cast<std::int64_t>(std::floor(t * config.line_frequency_hz));
        const double length = draw_in(config.object_length_lines, u01(rng));
        const double width = draw_in(config.object_width_pixels, u01(rng));
        const double x_min = (belt - width) * u01(rng);
        obj.bbox = {x_min, static_cast<double>(obj.arrival_line), x_min + width,
                    static_cast<double>(obj.arrival_line) + length};
        out.push_back(obj);
    }
}

// Pressure-weighted length of [lo, hi] covered by a sorted list of disjoint
// windows. Within a window opened at a, pressure at t is exp(-(t - a) / decay).
double covered_length(const std::vector<Window>& windows, double lo, double hi, double decay) {
    auto it = std::lower_bound(windows.begin(), windows.end(), lo,
                               [](const Window& w, double v) { return w.second < v; });
    double covered = 0.0;
    for (; it != windows.end() && it->first < hi; ++it) {
        const double a = std::max(lo, it->first);
        const double b = std::min(hi, it->second);
        if (b <= a) continue;
        if (decay > 0.0) {
            covered += decay * (std::exp(-(a - it->first) / decay) - std::exp(-(b - it->first) / decay));
        } else {
            covered += b - a;
        }
    }
    return covered;
}

void merge_windows(std::vector<Window>& windows) {
    if (windows.empty()) return;
    std::sort(windows.begin(), windows.end());
    std::size_t out = 0;
    for (std::size_t i = 1; i < windows.size(); ++i) {
        if (windows[i].first <= windows[out].second) {
            windows[out].second = std::max(windows[out].second, windows[i].second);
        } else {
            windows[++out] = windows[i];
        }
    }
    windows.resize(out + 1);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    // splitmix64 finalizer over a combination of both inputs
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void SimulatorConfig::validate() const {
    require(std::isfinite(line_frequency_hz) && line_frequency_hz > 0.0, "line_frequency_hz", "must be > 0");
    require(std::isfinite(nozzle_pitch_pixels) && nozzle_pitch_pixels >= 1.0, "nozzle_pitch_pixels", "must be >= 1");
    require(nozzle_count > 0, "nozzle_count", "must be > 0");
    require(belt_width_pixels > 0, "belt_width_pixels", "must be > 0");
    require(std::isfinite(nozzle_delay_lines), "nozzle_delay_lines", "must be finite");
    require(std::isfinite(jitter_std_lines) && jitter_std_lines >= 0.0, "jitter_std_lines", "must be >= 0");
    require(std::isfinite(lateral_drift_std_pixels) && lateral_drift_std_pixels >= 0.0, "lateral_drift_std_pixels",
            "must be >= 0");
    require(std::isfinite(valve_decay_lines) && valve_decay_lines >= 0.0, "valve_decay_lines", "must be >= 0");
    require(std::isfinite(true_transit_lines), "true_transit_lines", "must be finite");
    require(std::isfinite(arrival_rate_accept) && arrival_rate_accept >= 0.0, "arrival_rate_accept", "must be >= 0");
    require(std::isfinite(arrival_rate_reject) && arrival_rate_reject >= 0.0, "arrival_rate_reject", "must be >= 0");
    require(object_length_lines.min > 0.0 && object_length_lines.min <= object_length_lines.max,
            "object_length_lines", "needs 0 < min <= max");
    require(object_width_pixels.min > 0.0 && object_width_pixels.min <= object_width_pixels.max &&
                object_width_pixels.max <= belt_width_pixels,
            "object_width_pixels", "needs 0 < min <= max <= belt_width_pixels");
    require(hit_coverage_threshold > 0.0 && hit_coverage_threshold <= 1.0, "hit_coverage_threshold",
            "must lie in (0, 1]");
}

BoundingBox extend_bounding_box(const BoundingBox& bbox, const ParameterPoint& params, double belt_width_pixels) {
    const double ds = params.extended_space / 2.0;
    const double dt = params.extended_time / 2.0;
    return {std::clamp(bbox.x_min - ds, 0.0, belt_width_pixels), bbox.y_min - dt,
            std::clamp(bbox.x_max + ds, 0.0, belt_width_pixels), bbox.y_max + dt};
}

std::vector<SimObject> generate_stream(const SimulatorConfig& config, double duration_s) {
    config.validate();
    if (!(duration_s > 0.0)) throw ConfigError("duration_s must be > 0");
    std::vector<SimObject> stream;
    append_class(stream, config, duration_s, ObjectClass::accept, config.arrival_rate_accept, kAcceptStreamTag);
    append_class(stream, config, duration_s, ObjectClass::reject, config.arrival_rate_reject, kRejectStreamTag);
    auto key = [](const SimObject& o) {
        return std::tuple(o.arrival_line, o.class_label, o.bbox.x_min, o.bbox.x_max, o.bbox.y_max);
    };
    std::sort(stream.begin(), stream.end(), [&](const SimObject& a, const SimObject& b) { return key(a) < key(b); });
    stream.erase(std::unique(stream.begin(), stream.end(),
                             [](const SimObject& a, const SimObject& b) { return a.bbox == b.bbox; }),
                 stream.end());
    return stream;
}

double effective_reaction(const ParameterPoint& params, const SimulatorConfig& config, double jitter_draw) {
    return params.reaction_lines + config.nozzle_delay_lines + jitter_draw;
}

std::vector<IntervalResult> run_experiment(const SimulatorConfig& config, const ParameterPoint& params,
                                           double duration_s, double interval_s) {
    config.validate();
    if (!(duration_s > 0.0) || !std::isfinite(duration_s)) throw ConfigError("duration_s must be > 0");
    if (!(interval_s > 0.0) || !std::isfinite(interval_s)) throw ConfigError("interval_s must be > 0");
    const double ratio = duration_s / interval_s;
    const double n_intervals_d = std::round(ratio);
    if (n_intervals_d < 1.0 || std::abs(ratio - n_intervals_d) > 1e-9 * ratio) {
        throw ConfigError("interval_s must divide duration_s");
    }
    for (std::size_t d = 0; d < kParameterDims; ++d) {
        if (!std::isfinite(params[d])) throw ConfigError("process parameters must be finite");
    }

    const auto n_intervals = static_cast<std::size_t>(n_intervals_d);
    const double total_lines = duration_s * config.line_frequency_hz;
    const double lines_per_interval = interval_s * config.line_frequency_hz;
    const double belt = static_cast<double>(config.belt_width_pixels);
    const double pitch = config.nozzle_pitch_pixels;
    const int last_nozzle = config.nozzle_count - 1;

    const auto stream = generate_stream(config, duration_s);

    std::vector<std::vector<Window>> activations(static_cast<std::size_t>(config.nozzle_count));
    for (const auto& obj : stream) {
        if (obj.class_label != ObjectClass::reject) continue;
        const BoundingBox ext = extend_bounding_box(obj.bbox, params, belt);
        // nozzle k is centered at (k + 0.5) * pitch
        const int k_lo = std::max(0, static_cast<int>(std::ceil(ext.x_min / pitch - 0.5)));
        const int k_hi = std::min(last_nozzle, static_cast<int>(std::floor(ext.x_max / pitch - 0.5)));
        const Window window{ext.y_min + params.reaction_lines, ext.y_max + params.reaction_lines};
        if (window.second <= window.first) continue;
        for (int k = k_lo; k <= k_hi; ++k) activations[static_cast<std::size_t>(k)].push_back(window);
    }
    for (auto& w : activations) merge_windows(w);

    std::vector<IntervalResult> results(n_intervals);
    for (auto& r : results) r.duration_s = interval_s;

    // One engine drawn strictly in ordinal order: object i always receives
    // draws 2i and 2i + 1, whichever objects end up counted.
    std::mt19937_64 rng(derive_seed(config.seed, kObjectDrawTag));
    std::normal_distribution<double> std_normal(0.0, 1.0);
    const double arrival_shift = config.true_transit_lines + config.nozzle_delay_lines;
    for (const SimObject& obj : stream) {
        const double jitter = config.jitter_std_lines * std_normal(rng);
        const double drift = config.lateral_drift_std_pixels * std_normal(rng);

        const double t0 = obj.bbox.y_min + arrival_shift + jitter;
        const double t1 = obj.bbox.y_max + arrival_shift + jitter;
        if (t0 < 0.0 || t1 > total_lines) continue;
        const double x0 = obj.bbox.x_min + drift;
        const double x1 = obj.bbox.x_max + drift;

        const double area = (x1 - x0) * (t1 - t0);
        double covered = 0.0;
        const int k_lo = std::max(0, static_cast<int>(std::floor(x0 / pitch)));
        const int k_hi = std::min(last_nozzle, static_cast<int>(std::ceil(x1 / pitch)) - 1);
        for (int k = k_lo; k <= k_hi; ++k) {
            const auto& windows = activations[static_cast<std::size_t>(k)];
            if (windows.empty()) continue;
            const double cell_lo = k * pitch;
            const double overlap_x = std::min(x1, cell_lo + pitch) - std::max(x0, cell_lo);
            if (overlap_x <= 0.0) continue;
            covered += overlap_x * covered_length(windows, t0, t1, config.valve_decay_lines);
        }
        const bool ejected = covered >= config.hit_coverage_threshold * area * (1.0 - 1e-12);

        auto bucket = static_cast<std::size_t>(std::floor(t0 / lines_per_interval));
        bucket = std::min(bucket, n_intervals - 1);
        ConfusionMatrix& m = results[bucket].confusion;
        if (obj.class_label == ObjectClass::accept) {
            ++(ejected ? m.fn : m.tp);
        } else {
            ++(ejected ? m.tn : m.fp);
        }
    }
    return results;
}

}  // namespace sortbo
