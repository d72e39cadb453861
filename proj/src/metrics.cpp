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

#include "sortbo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

namespace sortbo {

double accuracy(const ConfusionMatrix& m) {
    const auto n = m.total();
    if (n == 0) throw EmptyMatrix();
    return static_cast<double>(m.tp + m.tn) / static_cast<double>(n);
}

NormalizedRates normalized_rates(const ConfusionMatrix& m) {
    NormalizedRates r;
    if (m.tp + m.fn > 0) r.tp_n = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    if (m.tn + m.fp > 0) r.tn_n = static_cast<double>(m.tn) / static_cast<double>(m.tn + m.fp);
    return r;
}

double accuracy_variance(double p, std::uint64_t n_total) {
    return p * (1.0 - p) / static_cast<double>(n_total);
}

std::pair<double, double> sample_mean_variance(std::vector<double> values) {
    // Sorting first makes the floating-point sums independent of input order.
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() < 2) return {mean, 0.0};
    if (values.front() == values.back()) return {values.front(), 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, ss / (n - 1.0)};
}

ExperimentRecord aggregate_experiment(const ParameterPoint& params,
                                      std::vector<IntervalResult> intervals) {
    std::vector<double> tp_rates;
    std::vector<double> tn_rates;
    for (const auto& interval : intervals) {
        const auto rates = normalized_rates(interval.confusion);
        if (rates.tp_n) tp_rates.push_back(*rates.tp_n);
        if (rates.tn_n) tn_rates.push_back(*rates.tn_n);
    }
    if (tp_rates.size() < 2 || tn_rates.size() < 2) {
        throw InsufficientIntervals("need at least 2 intervals with defined rates (accept: " +
                                    std::to_string(tp_rates.size()) +
                                    ", reject: " + std::to_string(tn_rates.size()) + ")");
    }
    ExperimentRecord rec;
    rec.params = params;
    std::tie(rec.tp_n_mean, rec.tp_n_var) = sample_mean_variance(std::move(tp_rates));
    std::tie(rec.tn_n_mean, rec.tn_n_var) = sample_mean_variance(std::move(tn_rates));
    rec.intervals = std::move(intervals);
    return rec;
}

std::vector<IntervalResult> rebucket(const std::vector<IntervalResult>& intervals, std::size_t factor) {
    std::vector<IntervalResult> out;
    if (factor == 0) return out;
    for (std::size_t start = 0; start + factor <= intervals.size(); start += factor) {
        IntervalResult merged;
        for (std::size_t i = start; i < start + factor; ++i) {
            merged.confusion += intervals[i].confusion;
            merged.duration_s += intervals[i].duration_s;
        }
        out.push_back(merged);
    }
    return out;
}

double variance_scaling_fit(const std::vector<std::pair<double, double>>& series) {
    if (series.size() < 3) throw DegenerateFit("variance scaling fit needs at least 3 points");
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& [t, var] : series) {
        if (!(t > 0.0) || !(var > 0.0)) throw DegenerateFit("variance scaling fit needs t > 0 and var > 0");
        xs.push_back(std::log(t));
        ys.push_back(std::log(var));
    }
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw DegenerateFit("all acquisition times are equal");
    return sxy / sxx;
}

std::vector<std::pair<double, double>> variance_study(const std::vector<std::vector<IntervalResult>>& experiments,
                                                      const std::vector<double>& times) {
    std::vector<std::pair<double, double>> rows;
    for (const double t : times) {
        double sum_sq = 0.0;
        double dof = 0.0;
        for (const auto& intervals : experiments) {
            if (intervals.empty() || !(intervals.front().duration_s > 0.0)) continue;
            const double ratio = t / intervals.front().duration_s;
            const double factor = std::round(ratio);
            if (factor < 1.0 || std::abs(ratio - factor) > 1e-9 * ratio) continue;
            std::vector<double> rates;
            for (const auto& iv : rebucket(intervals, static_cast<std::size_t>(factor))) {
                if (const auto r = normalized_rates(iv.confusion).tp_n) rates.push_back(*r);
            }
            if (rates.size() < 2) continue;
            sum_sq += sample_mean_variance(rates).second * static_cast<double>(rates.size() - 1);
            dof += static_cast<double>(rates.size() - 1);
        }
        if (dof > 0.0) rows.emplace_back(t, sum_sq / dof);
    }
    return rows;
}

}  // namespace sortbo
