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

#include "sortbo/gpr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include "sortbo/local_search.hpp"
#include "sortbo/parallel.hpp"

namespace sortbo {

namespace {

constexpr double kMaxNugget = 1e-2;
constexpr double kFallbackNugget = 1e-8;
const double kLogLower = std::log(0.1);
const double kLogUpper = std::log(10.0);

struct Standardized {
    double mean = 0.0;
    double scale = 1.0;
    Eigen::VectorXd y;
};

Standardized standardize(const std::vector<double>& targets) {
    Standardized s;
    const auto n = static_cast<double>(targets.size());
    const auto [lo, hi] = std::minmax_element(targets.begin(), targets.end());
    double sum = 0.0;
    for (double t : targets) sum += t;
    s.mean = sum / n;
    if (*lo != *hi) {
        double ss = 0.0;
        for (double t : targets) ss += (t - s.mean) * (t - s.mean);
        s.scale = std::sqrt(ss / n);
    }
    s.y.resize(static_cast<Eigen::Index>(targets.size()));
    for (std::size_t i = 0; i < targets.size(); ++i) {
        s.y(static_cast<Eigen::Index>(i)) = (targets[i] - s.mean) / s.scale;
    }
    return s;
}

// K + lambda * diag(sigma^2) / scale^2, without the nugget.
Eigen::MatrixXd noisy_gram(const TrainingSet& training, const KernelParams& kernel, double scale) {
    Eigen::MatrixXd k = gram_matrix(training.inputs, kernel);
    const double noise_factor = training.noise_weight / (scale * scale);
    for (std::size_t i = 0; i < training.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        k(ii, ii) += noise_factor * training.noise_variances[i];
    }
    return k;
}

struct Factorized {
    Eigen::MatrixXd lower;
    double nugget = 0.0;
};

std::optional<Factorized> try_factorize(const Eigen::MatrixXd& base, double nugget_start) {
    double nugget = nugget_start;
    while (true) {
        Eigen::MatrixXd k = base;
        k.diagonal().array() += nugget;
        Eigen::LLT<Eigen::MatrixXd> llt(k);
        if (llt.info() == Eigen::Success && (llt.matrixL().toDenseMatrix().diagonal().array() > 0.0).all()) {
            return Factorized{llt.matrixL().toDenseMatrix(), nugget};
        }
        if (nugget >= kMaxNugget) return std::nullopt;
        nugget = nugget == 0.0 ? kFallbackNugget : std::min(nugget * 10.0, kMaxNugget);
    }
}

Factorized factorize(const Eigen::MatrixXd& base, double nugget_start) {
    auto f = try_factorize(base, nugget_start);
    if (!f) {
        throw FactorizationFailure("kernel matrix is not positive definite even with nugget " +
                                   std::to_string(kMaxNugget));
    }
    return std::move(*f);
}

double lml_from_factor(const Factorized& f, const Eigen::VectorXd& y) {
    const Eigen::VectorXd z = f.lower.triangularView<Eigen::Lower>().solve(y);
    const double log_det_half = f.lower.diagonal().array().log().sum();
    const double n = static_cast<double>(y.size());
    return -0.5 * z.squaredNorm() - log_det_half - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

std::array<double, kParameterDims> input_ranges(const std::vector<ParameterPoint>& inputs) {
    std::array<double, kParameterDims> ranges{};
    for (std::size_t d = 0; d < kParameterDims; ++d) {
        double lo = inputs.front()[d];
        double hi = lo;
        for (const auto& p : inputs) {
            lo = std::min(lo, p[d]);
            hi = std::max(hi, p[d]);
        }
        ranges[d] = hi > lo ? hi - lo : 1.0;
    }
    return ranges;
}

// theta = (ln signal_variance, ln(length_scale_d / range_d)...)
KernelParams kernel_from_theta(std::span<const double> theta, const std::array<double, kParameterDims>& ranges,
                               double nugget) {
    KernelParams k;
    k.signal_variance = std::exp(theta[0]);
    for (std::size_t d = 0; d < kParameterDims; ++d) k.length_scales[d] = ranges[d] * std::exp(theta[d + 1]);
    k.nugget = nugget;
    return k;
}

KernelParams select_hyperparameters(const TrainingSet& training, const Standardized& s,
                                    const KernelParams& init, const FitOptions& options) {
    const auto ranges = input_ranges(training.inputs);
    constexpr std::size_t n_theta = kParameterDims + 1;
    const std::vector<double> lower(n_theta, kLogLower);
    const std::vector<double> upper(n_theta, kLogUpper);

    const int restarts = std::max(1, options.restarts);
    std::vector<std::vector<double>> starts;
    std::vector<double> first(n_theta);
    first[0] = std::log(init.signal_variance);
    for (std::size_t d = 0; d < kParameterDims; ++d) first[d + 1] = std::log(init.length_scales[d] / ranges[d]);
    starts.push_back(first);
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> u(kLogLower, kLogUpper);
    for (int r = 1; r < restarts; ++r) {
        std::vector<double> start(n_theta);
        for (auto& v : start) v = u(rng);
        starts.push_back(std::move(start));
    }

    auto objective = [&](std::span<const double> theta) {
        const KernelParams k = kernel_from_theta(theta, ranges, init.nugget);
        const auto f = try_factorize(noisy_gram(training, k, s.scale), init.nugget);
        if (!f) return -std::numeric_limits<double>::infinity();
        return lml_from_factor(*f, s.y);
    };

    CompassOptions copts;
    copts.initial_step = 0.125;
    copts.min_step = 1e-4;
    copts.max_evaluations = options.max_evaluations;
    std::vector<CompassResult> results(starts.size());
    parallel_for(starts.size(), options.workers, [&](std::size_t i) {
        results[i] = compass_maximize(objective, starts[i], lower, upper, copts);
    });

    std::size_t best = 0;
    for (std::size_t i = 1; i < results.size(); ++i) {
        if (results[i].value > results[best].value) best = i;
    }
    if (!std::isfinite(results[best].value)) {
        throw FactorizationFailure("no hyperparameter candidate produced a positive-definite kernel matrix");
    }
    return kernel_from_theta(results[best].x, ranges, init.nugget);
}

}  // namespace

bool KernelParams::valid() const {
    if (!(signal_variance > 0.0) || !std::isfinite(signal_variance)) return false;
    for (double l : length_scales) {
        if (!(l > 0.0) || !std::isfinite(l)) return false;
    }
    return nugget >= 0.0 && std::isfinite(nugget);
}

void TrainingSet::validate() const {
    if (inputs.empty()) throw std::invalid_argument("training set is empty");
    if (targets.size() != inputs.size() || noise_variances.size() != inputs.size()) {
        throw std::invalid_argument("training inputs, targets and noise variances differ in length");
    }
    if (!(noise_weight >= 0.0)) throw std::invalid_argument("noise weight must be non-negative");
    for (double v : noise_variances) {
        if (!(v >= 0.0)) throw std::invalid_argument("noise variances must be non-negative");
    }
    for (double t : targets) {
        if (!std::isfinite(t)) throw std::invalid_argument("training targets must be finite");
    }
}

double kernel_eval(const ParameterPoint& a, const ParameterPoint& b, const KernelParams& params) {
    double r2 = 0.0;
    for (std::size_t d = 0; d < kParameterDims; ++d) {
        const double z = (a[d] - b[d]) / params.length_scales[d];
        r2 += z * z;
    }
    return params.signal_variance * std::exp(-0.5 * r2);
}

Eigen::MatrixXd gram_matrix(const std::vector<ParameterPoint>& points, const KernelParams& params) {
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = params.signal_variance;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double v = kernel_eval(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)], params);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

GprModel fit(const TrainingSet& training, const KernelParams& kernel_init, bool optimize_hyperparams,
             const FitOptions& options) {
    training.validate();
    if (!kernel_init.valid()) throw std::invalid_argument("invalid kernel parameters");

    if (kernel_init.nugget == 0.0) {
        for (std::size_t i = 0; i < training.size(); ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                const bool noiseless = training.noise_weight * (training.noise_variances[i] + training.noise_variances[j]) == 0.0;
                if (noiseless && training.inputs[i] == training.inputs[j] && training.targets[i] != training.targets[j]) {
                    throw DegenerateInput("coincident noiseless inputs with different targets");
                }
            }
        }
    }

    const Standardized s = standardize(training.targets);
    KernelParams kernel = optimize_hyperparams ? select_hyperparameters(training, s, kernel_init, options) : kernel_init;
    Factorized f = factorize(noisy_gram(training, kernel, s.scale), kernel.nugget);
    kernel.nugget = f.nugget;

    GprModel model;
    model.training_ = training;
    model.kernel_ = kernel;
    model.target_mean_ = s.mean;
    model.target_scale_ = s.scale;
    model.alpha_ = f.lower.transpose().triangularView<Eigen::Upper>().solve(
        f.lower.triangularView<Eigen::Lower>().solve(s.y));
    model.factor_ = std::move(f.lower);
    return model;
}

Eigen::MatrixXd GprModel::regularized_matrix() const {
    Eigen::MatrixXd k = noisy_gram(training_, kernel_, target_scale_);
    k.diagonal().array() += kernel_.nugget;
    return k;
}

double GprModel::predict_mean(const ParameterPoint& query) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < training_.size(); ++i) {
        acc += kernel_eval(query, training_.inputs[i], kernel_) * alpha_(static_cast<Eigen::Index>(i));
    }
    return target_mean_ + target_scale_ * acc;
}

Posterior GprModel::predict(const ParameterPoint& query) const {
    const auto n = static_cast<Eigen::Index>(training_.size());
    Eigen::VectorXd k_star(n);
    for (Eigen::Index i = 0; i < n; ++i) k_star(i) = kernel_eval(query, training_.inputs[static_cast<std::size_t>(i)], kernel_);
    const Eigen::VectorXd v = factor_.triangularView<Eigen::Lower>().solve(k_star);
    Posterior p;
    p.mean = target_mean_ + target_scale_ * k_star.dot(alpha_);
    p.variance = target_scale_ * target_scale_ * std::max(0.0, kernel_.signal_variance - v.squaredNorm());
    return p;
}

double log_marginal_likelihood(const TrainingSet& training, const KernelParams& kernel) {
    training.validate();
    if (!kernel.valid()) throw std::invalid_argument("invalid kernel parameters");
    const Standardized s = standardize(training.targets);
    return lml_from_factor(factorize(noisy_gram(training, kernel, s.scale), kernel.nugget), s.y);
}

}  // namespace sortbo
