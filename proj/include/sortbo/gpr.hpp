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

#ifndef SORTBO_GPR_HPP
#define SORTBO_GPR_HPP

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "sortbo/parameter_point.hpp"

namespace sortbo {

class FactorizationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Squared-exponential kernel with one length scale per parameter.
struct KernelParams {
    double signal_variance = 1.0;
    std::array<double, kParameterDims> length_scales{1.0, 1.0, 1.0};
    double nugget = 1e-8;

    bool valid() const;
};

struct TrainingSet {
    std::vector<ParameterPoint> inputs;
    std::vector<double> targets;
    std::vector<double> noise_variances;
    double noise_weight = 0.0;

    std::size_t size() const { return inputs.size(); }
    /// Throws std::invalid_argument on mismatched lengths or negative noise.
    void validate() const;
};

struct Posterior {
    double mean = 0.0;
    double variance = 0.0;
};

struct FitOptions {
    int restarts = 8;
    /// Evaluation budget of each local search.
    int max_evaluations = 300;
    std::size_t workers = 1;
    unsigned long long seed = 0x5EEDC0DEULL;
};

double kernel_eval(const ParameterPoint& a, const ParameterPoint& b, const KernelParams& params);

/// Gram matrix of the kernel over a point set.
Eigen::MatrixXd gram_matrix(const std::vector<ParameterPoint>& points, const KernelParams& params);

/// Fitted zero-mean GP on standardized targets. Immutable once built.
///
/// The regularized matrix is K + lambda * diag(sigma^2) / scale^2 + nugget * I,
/// where the per-point noise is rescaled with the targets so that it stays
/// in standardized units.
class GprModel {
public:
    const TrainingSet& training() const { return training_; }
    const KernelParams& kernel() const { return kernel_; }
    double target_mean() const { return target_mean_; }
    double target_scale() const { return target_scale_; }
    const Eigen::MatrixXd& factor() const { return factor_; }
    const Eigen::VectorXd& alpha() const { return alpha_; }
    /// The matrix that `factor()` factorizes.
    Eigen::MatrixXd regularized_matrix() const;

    Posterior predict(const ParameterPoint& query) const;
    /// Posterior mean only; skips the triangular solve.
    double predict_mean(const ParameterPoint& query) const;

private:
    friend GprModel fit(const TrainingSet&, const KernelParams&, bool, const FitOptions&);

    TrainingSet training_;
    KernelParams kernel_;
    double target_mean_ = 0.0;
    double target_scale_ = 1.0;
    Eigen::MatrixXd factor_;
    Eigen::VectorXd alpha_;
};

/// Standardizes the targets, optionally selects hyperparameters by maximizing
/// the log marginal likelihood (multi-start, log-space, length scales bounded
/// relative to the input ranges) and factorizes the regularized matrix.
///
/// The nugget of `kernel_init` is the starting jitter; on a failed
/// factorization it is raised tenfold up to 1e-2 before FactorizationFailure
/// is thrown.
GprModel fit(const TrainingSet& training, const KernelParams& kernel_init, bool optimize_hyperparams,
             const FitOptions& options = {});

/// Gaussian log marginal likelihood of the standardized targets.
double log_marginal_likelihood(const TrainingSet& training, const KernelParams& kernel);

}  // namespace sortbo

#endif  // SORTBO_GPR_HPP
