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


#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sortbo/gpr.hpp"

namespace sortbo {
namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

// Textbook GP posterior with an explicit inverse, written independently of
// the library's Cholesky path.
struct DenseOracle {
    Eigen::MatrixXd k_inv;
    Eigen::VectorXd y;
    double mean = 0.0;
    double scale = 1.0;
    TrainingSet training;
    KernelParams kernel;

    DenseOracle(const TrainingSet& t, const KernelParams& k) : training(t), kernel(k) {
        const auto n = static_cast<Eigen::Index>(t.size());
        for (double v : t.targets) mean += v;
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (double v : t.targets) ss += (v - mean) * (v - mean);
        scale = ss > 0.0 ? std::sqrt(ss / static_cast<double>(n)) : 1.0;
        Eigen::MatrixXd kn(n, n);
        y.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            y(i) = (t.targets[i] - mean) / scale;
            for (Eigen::Index j = 0; j < n; ++j) kn(i, j) = se(t.inputs[i], t.inputs[j]);
            kn(i, i) += t.noise_weight * t.noise_variances[i] / (scale * scale) + k.nugget;
        }
        k_inv = kn.inverse();
    }

    double se(const ParameterPoint& a, const ParameterPoint& b) const {
        double r2 = 0.0;
        for (std::size_t d = 0; d < 3; ++d) r2 += std::pow((a[d] - b[d]) / kernel.length_scales[d], 2);
        return kernel.signal_variance * std::exp(-0.5 * r2);
    }

    Posterior predict(const ParameterPoint& q) const {
        const auto n = static_cast<Eigen::Index>(training.size());
        Eigen::VectorXd ks(n);
        for (Eigen::Index i = 0; i < n; ++i) ks(i) = se(q, training.inputs[i]);
        const double m = ks.dot(k_inv * y);
        const double v = kernel.signal_variance - ks.dot(k_inv * ks);
        return {mean + scale * m, scale * scale * std::max(0.0, v)};
    }
};

ParameterPoint random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> tr(12, 21), ext(0, 8);
    return {tr(rng), ext(rng), ext(rng)};
}

TrainingSet random_training(std::mt19937_64& rng, std::size_t n, double lambda) {
    std::uniform_real_distribution<double> target(0.5, 1.0), noise(0.0, 0.01);
    TrainingSet t;
    t.noise_weight = lambda;
    for (std::size_t i = 0; i < n; ++i) {
        t.inputs.push_back(random_point(rng));
        t.targets.push_back(target(rng));
        t.noise_variances.push_back(noise(rng));
    }
    return t;
}

KernelParams fixed_kernel() {
    KernelParams k;
    k.signal_variance = 1.3;
    k.length_scales = {3.0, 4.0, 5.0};
    k.nugget = 1e-8;
    return k;
}

TEST(Kernel, Examples) {
    KernelParams k;
    k.length_scales = {1, 1, 1};
    EXPECT_NEAR(kernel_eval({0, 0, 0}, {1, 0, 0}, k), std::exp(-0.5), 1e-15);
    EXPECT_NEAR(kernel_eval({0, 0, 0}, {1, 0, 0}, k), 0.60653, 1e-5);
    k.signal_variance = 2.5;
    EXPECT_EQ(kernel_eval({3, 4, 5}, {3, 4, 5}, k), 2.5);
    EXPECT_LT(kernel_eval({0, 0, 0}, {1e3, 0, 0}, k), 1e-300);
}

TEST(Kernel, SymmetricAndAnisotropic) {
    KernelParams k;
    k.length_scales = {1, 2, 4};
    const ParameterPoint a{1, 2, 3}, b{2, 4, 7};
    EXPECT_EQ(kernel_eval(a, b, k), kernel_eval(b, a, k));
    EXPECT_NEAR(kernel_eval(a, b, k), std::exp(-0.5 * 3.0), 1e-15);
}

TEST(Kernel, GramIsSymmetricPsd) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ls(0.1, 10), sv(0.1, 10);
    for (int trial = 0; trial < 100; ++trial) {
        KernelParams k;
        k.signal_variance = sv(rng);
        k.length_scales = {ls(rng), ls(rng), ls(rng)};
        std::vector<ParameterPoint> pts;
        const std::size_t n = 1 + trial % 12;
        for (std::size_t i = 0; i < n; ++i) pts.push_back(random_point(rng));
        const Eigen::MatrixXd g = gram_matrix(pts, k);
        EXPECT_EQ(g, g.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
        EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10 * k.signal_variance);
    }
}

TEST(Fit, SinglePointInterpolates) {
    TrainingSet t{{{15, 0, 0}}, {0.5}, {0.0}, 0.0};
    const auto m = fit(t, KernelParams{}, false);
    EXPECT_NEAR(m.predict({15, 0, 0}).mean, 0.5, 1e-12);
    EXPECT_EQ(m.target_scale(), 1.0);
}

TEST(Fit, SinglePointHandFormula) {
    // one observation: the standardized target is 0, so the mean is y everywhere
    // and the variance follows sf2 - k(d)^2 / (sf2 + nugget)
    KernelParams k;
    k.signal_variance = 1.0;
    k.length_scales = {2, 2, 2};
    k.nugget = 1e-8;
    TrainingSet t{{{10, 0, 0}}, {1.0}, {0.0}, 0.0};
    const auto m = fit(t, k, false);
    for (double d : {0.0, 0.5, 1.0, 3.0}) {
        const double kd = std::exp(-0.5 * (d / 2) * (d / 2));
        const auto p = m.predict({10 + d, 0, 0});
        EXPECT_NEAR(p.mean, 1.0, 1e-12);
        EXPECT_NEAR(p.variance, 1.0 - kd * kd / (1.0 + 1e-8), 1e-12);
    }
}

TEST(Fit, TwoPointHandFormula) {
    // y = (0, 1) standardizes to (-1, 1); K = [[1, r], [r, 1]]
    KernelParams k;
    k.length_scales = {1, 1, 1};
    k.nugget = 0.0;
    TrainingSet t{{{0, 0, 0}, {1, 0, 0}}, {0.0, 1.0}, {0.0, 0.0}, 0.0};
    const auto m = fit(t, k, false);
    const double r = std::exp(-0.5);
    const ParameterPoint q{0.25, 0, 0};
    const double k1 = std::exp(-0.5 * 0.0625), k2 = std::exp(-0.5 * 0.5625);
    const double det = 1 - r * r;
    const double w1 = (k1 - r * k2) / det, w2 = (k2 - r * k1) / det;
    const auto p = m.predict(q);
    EXPECT_NEAR(p.mean, 0.5 + 0.5 * (-w1 + w2), 1e-12);
    EXPECT_NEAR(p.variance, 0.25 * (1 - (k1 * w1 + k2 * w2)), 1e-12);
}

TEST(Fit, InterpolatesWithoutNoise) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const auto t = random_training(rng, 8, 0.0);
        KernelParams k = fixed_kernel();
        k.nugget = 1e-10;
        const auto m = fit(t, k, false);
        for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(m.predict(t.inputs[i]).mean, t.targets[i], 1e-6);
    }
}

TEST(Fit, InterpolationVarianceBoundedByNugget) {
    std::mt19937_64 rng(6);
    const auto t = random_training(rng, 6, 0.0);
    const auto m = fit(t, fixed_kernel(), false);
    const double s2 = m.target_scale() * m.target_scale();
    for (const auto& x : t.inputs) EXPECT_LE(m.predict(x).variance, m.kernel().nugget * s2 * (1 + 1e-6));
}

TEST(Fit, MatchesDenseOracle) {
    std::mt19937_64 rng(8);
    for (double lambda : {0.0, 0.1, 1.0}) {
        for (std::size_t n = 1; n <= 10; ++n) {
            const auto t = random_training(rng, n, lambda);
            const auto m = fit(t, fixed_kernel(), false);
            const DenseOracle oracle(t, m.kernel());
            for (int q = 0; q < 20; ++q) {
                const auto x = random_point(rng);
                const auto a = m.predict(x);
                const auto b = oracle.predict(x);
                EXPECT_LT(rel_err(a.mean, b.mean), 1e-8);
                EXPECT_LT(rel_err(a.variance, b.variance), 1e-8);
                EXPECT_LT(rel_err(m.predict_mean(x), a.mean), 1e-12);
            }
        }
    }
}

TEST(Fit, FactorReconstructsRegularizedMatrix) {
    std::mt19937_64 rng(9);
    const auto t = random_training(rng, 9, 0.1);
    const auto m = fit(t, fixed_kernel(), true);
    const Eigen::MatrixXd a = m.regularized_matrix();
    const Eigen::MatrixXd llt = m.factor() * m.factor().transpose();
    EXPECT_LT((llt - a).norm() / a.norm(), 1e-8);
    // the diagonal carries lambda-weighted noise on the standardized scale
    const double s2 = m.target_scale() * m.target_scale();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        EXPECT_NEAR(a(i, i), m.kernel().signal_variance + 0.1 * t.noise_variances[i] / s2 + m.kernel().nugget, 1e-12);
    }
}

TEST(Fit, ConstantTargets) {
    TrainingSet t{{{12, 0, 0}, {15, 4, 4}, {18, 8, 8}}, {0.7, 0.7, 0.7}, {0.01, 0.0, 0.02}, 0.1};
    const auto m = fit(t, fixed_kernel(), true);
    EXPECT_EQ(m.target_scale(), 1.0);
    EXPECT_NEAR(m.predict({14, 2, 2}).mean, 0.7, 1e-12);
    EXPECT_NEAR(m.predict({40, 2, 2}).mean, 0.7, 1e-12);
}

TEST(Fit, DegenerateCoincidentInputs) {
    KernelParams k = fixed_kernel();
    k.nugget = 0.0;
    TrainingSet t{{{15, 0, 0}, {15, 0, 0}}, {0.6, 0.9}, {0.0, 0.0}, 0.0};
    EXPECT_THROW(fit(t, k, false), DegenerateInput);
    // the same pair with a nugget is a repeated noisy measurement
    k.nugget = 1e-8;
    const auto m = fit(t, k, false);
    EXPECT_NEAR(m.predict({15, 0, 0}).mean, 0.75, 1e-6);
    // or with lambda-weighted noise
    k.nugget = 0.0;
    t.noise_weight = 0.1;
    t.noise_variances = {0.01, 0.01};
    EXPECT_NO_THROW(fit(t, k, false));
}

TEST(Fit, NuggetEscalatesOnNearSingularMatrix) {
    KernelParams k = fixed_kernel();
    k.nugget = 0.0;
    k.length_scales = {100, 100, 100};
    TrainingSet t{{{15, 0, 0}, {15, 0, 1e-9}, {15, 0, 2e-9}}, {0.6, 0.6, 0.9}, {0, 0, 0}, 0.0};
    const auto m = fit(t, k, false);
    EXPECT_GE(m.kernel().nugget, 1e-8);
    EXPECT_LE(m.kernel().nugget, 1e-2);
}

TEST(Fit, RejectsInvalidInput) {
    TrainingSet t{{{15, 0, 0}}, {0.5, 0.6}, {0.0}, 0.0};
    EXPECT_THROW(fit(t, KernelParams{}, false), std::invalid_argument);
    TrainingSet neg{{{15, 0, 0}}, {0.5}, {-1.0}, 0.0};
    EXPECT_THROW(fit(neg, KernelParams{}, false), std::invalid_argument);
    KernelParams bad;
    bad.length_scales[1] = 0.0;
    EXPECT_FALSE(bad.valid());
}

TEST(Predict, RecoversPriorFarFromData) {
    std::mt19937_64 rng(10);
    const auto t = random_training(rng, 7, 0.1);
    const auto m = fit(t, fixed_kernel(), false);
    const auto p = m.predict({12 + 20 * 5.0 + 100, 0, 0});
    EXPECT_NEAR(p.mean, m.target_mean(), 1e-6);
    EXPECT_NEAR(p.variance, m.kernel().signal_variance * m.target_scale() * m.target_scale(), 1e-6);
}

TEST(Predict, NoiseWeightNeverLowersVariance) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 5; ++trial) {
        auto t = random_training(rng, 10, 0.1);
        const auto m_low = fit(t, fixed_kernel(), false);
        t.noise_weight = 1.0;
        const auto m_high = fit(t, fixed_kernel(), false);
        for (int q = 0; q < 100; ++q) {
            const auto x = random_point(rng);
            EXPECT_GE(m_high.predict(x).variance, m_low.predict(x).variance);
        }
    }
}

TEST(Predict, AffineTargetInvariance) {
    std::mt19937_64 rng(13);
    const auto t = random_training(rng, 9, 0.1);
    const double a = 3.5, b = -1.25;
    TrainingSet u = t;
    for (auto& y : u.targets) y = a * y + b;
    for (auto& s : u.noise_variances) s *= a * a;
    const auto m = fit(t, fixed_kernel(), true);
    const auto n = fit(u, fixed_kernel(), true);
    for (int q = 0; q < 50; ++q) {
        const auto x = random_point(rng);
        const auto p = m.predict(x), r = n.predict(x);
        EXPECT_LT(rel_err(r.mean, a * p.mean + b), 1e-8);
        EXPECT_LT(std::abs(r.variance - a * a * p.variance), 1e-8 * std::max(1.0, a * a * p.variance));
    }
}

TEST(LogMarginalLikelihood, UnivariateClosedForm) {
    KernelParams k;
    k.signal_variance = 1.0;
    k.nugget = 0.0;
    TrainingSet t{{{15, 0, 0}}, {0.8}, {0.0}, 0.0};
    EXPECT_NEAR(log_marginal_likelihood(t, k), -0.5 * std::log(2 * std::numbers::pi), 1e-12);
    EXPECT_NEAR(log_marginal_likelihood(t, k), -0.91894, 1e-5);
}

TEST(LogMarginalLikelihood, MatchesDenseOracle) {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 10; ++trial) {
        const auto t = random_training(rng, 3, trial % 2 ? 0.1 : 0.0);
        const KernelParams k = fixed_kernel();
        const DenseOracle o(t, k);
        const Eigen::MatrixXd kn = o.k_inv.inverse();
        const double expected = -0.5 * o.y.dot(o.k_inv * o.y) - 0.5 * std::log(kn.determinant()) -
                                1.5 * std::log(2 * std::numbers::pi);
        EXPECT_LT(rel_err(log_marginal_likelihood(t, k), expected), 1e-8);
    }
}

TEST(LogMarginalLikelihood, ContinuousInNugget) {
    std::mt19937_64 rng(15);
    const auto t = random_training(rng, 6, 0.0);
    KernelParams k = fixed_kernel();
    double prev = 0.0;
    for (int i = 0; i <= 40; ++i) {
        k.nugget = 1e-6 * std::pow(1.2, i);
        double v = 0.0;
        ASSERT_NO_THROW(v = log_marginal_likelihood(t, k));
        if (i > 0) {
            EXPECT_LT(std::abs(v - prev), 5.0);
        }
        prev = v;
    }
}

TEST(Hyperparameters, ImproveLikelihoodAndStayInBounds) {
    std::mt19937_64 rng(16);
    TrainingSet t;
    t.noise_weight = 0.1;
    for (int i = 0; i < 12; ++i) {
        const auto x = random_point(rng);
        t.inputs.push_back(x);
        t.targets.push_back(std::exp(-std::pow((x.reaction_lines - 15) / 3, 2)));
        t.noise_variances.push_back(1e-4);
    }
    KernelParams init;
    init.length_scales = {9, 8, 8};
    const auto m = fit(t, init, true);
    EXPECT_GE(log_marginal_likelihood(t, m.kernel()), log_marginal_likelihood(t, init) - 1e-12);
    double ranges[3];
    for (std::size_t d = 0; d < 3; ++d) {
        double lo = t.inputs[0][d], hi = lo;
        for (const auto& x : t.inputs) lo = std::min(lo, x[d]), hi = std::max(hi, x[d]);
        ranges[d] = hi - lo;
    }
    EXPECT_GE(m.kernel().signal_variance, 0.1 * (1 - 1e-9));
    EXPECT_LE(m.kernel().signal_variance, 10 * (1 + 1e-9));
    for (std::size_t d = 0; d < 3; ++d) {
        EXPECT_GE(m.kernel().length_scales[d], 0.1 * ranges[d] * (1 - 1e-9));
        EXPECT_LE(m.kernel().length_scales[d], 10 * ranges[d] * (1 + 1e-9));
    }
}

TEST(Hyperparameters, IndependentOfWorkerCount) {
    std::mt19937_64 rng(17);
    const auto t = random_training(rng, 10, 0.1);
    FitOptions one, four;
    four.workers = 4;
    const auto a = fit(t, fixed_kernel(), true, one);
    const auto b = fit(t, fixed_kernel(), true, four);
    EXPECT_EQ(a.kernel().signal_variance, b.kernel().signal_variance);
    EXPECT_EQ(a.kernel().length_scales, b.kernel().length_scales);
    EXPECT_EQ(a.alpha(), b.alpha());
}

}  // namespace
}  // namespace sortbo
