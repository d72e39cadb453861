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

#ifndef SORTBO_METRICS_HPP
#define SORTBO_METRICS_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sortbo/parameter_point.hpp"

namespace sortbo {

class EmptyMatrix : public std::domain_error {
public:
    EmptyMatrix() : std::domain_error("confusion matrix has no objects") {}
};

class InsufficientIntervals : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateFit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sorting outcome counts with the accept class as the positive class:
///
///                   accept stream   reject stream
///   actual accept        tp              fn
///   actual reject        fp              tn
///
/// so tp = accept kept, fn = accept ejected, fp = reject kept and
/// tn = reject ejected.
struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t fn = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const { return tp + fn + fp + tn; }

    ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
        tp += o.tp;
        fn += o.fn;
        fp += o.fp;
        tn += o.tn;
        return *this;
    }
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Per-stream recall. An empty denominator leaves the rate undefined.
struct NormalizedRates {
    std::optional<double> tp_n;
    std::optional<double> tn_n;
};

struct IntervalResult {
    ConfusionMatrix confusion;
    double duration_s = 0.0;

    friend bool operator==(const IntervalResult&, const IntervalResult&) = default;
};

/// One sorting experiment with its interval breakdown and aggregates.
struct ExperimentRecord {
    ParameterPoint params;
    std::vector<IntervalResult> intervals;
    double tp_n_mean = 0.0;
    double tn_n_mean = 0.0;
    double tp_n_var = 0.0;
    double tn_n_var = 0.0;
    double timestamp = 0.0;

    friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

/// (tp + tn) / N_total. Throws EmptyMatrix when N_total is zero.
double accuracy(const ConfusionMatrix& m);

NormalizedRates normalized_rates(const ConfusionMatrix& m);

/// Binomial variance p(1 - p) / n_total of an accuracy estimate.
double accuracy_variance(double p, std::uint64_t n_total);

/// Means and unbiased sample variances of the per-interval normalized rates.
/// Intervals whose rate is undefined are dropped for that objective only.
/// Throws InsufficientIntervals when either objective has fewer than two
/// defined intervals. The result does not depend on interval order.
ExperimentRecord aggregate_experiment(const ParameterPoint& params,
                                      std::vector<IntervalResult> intervals);

/// Merges consecutive groups of `factor` intervals. A trailing partial group
/// is dropped.
std::vector<IntervalResult> rebucket(const std::vector<IntervalResult>& intervals, std::size_t factor);

/// Least-squares slope of log(var) against log(t).
double variance_scaling_fit(const std::vector<std::pair<double, double>>& series);

/// Pooled within-experiment variance of the per-interval normalized TP after
/// merging intervals to each acquisition time in `times`. Times that are not
/// a whole multiple of an experiment's interval length, or leave fewer than
/// two merged intervals, are skipped. Returns (t, var) rows in input order.
std::vector<std::pair<double, double>> variance_study(const std::vector<std::vector<IntervalResult>>& experiments,
                                                      const std::vector<double>& times);

/// Mean and unbiased variance of a sample; order independent.
std::pair<double, double> sample_mean_variance(std::vector<double> values);

}  // namespace sortbo

#endif  // SORTBO_METRICS_HPP
