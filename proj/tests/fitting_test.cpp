// Copyright 2026 The biphoton Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "biphoton/fitting.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "biphoton/counting.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

using namespace biphoton;

namespace {

struct Series {
    std::vector<double> x;
    std::vector<double> y;
};

Series sinc_fringe(double V, double sigma, double lambda, double x0, double phase, double A, double from, double to,
           double step) {
    Series s;
    for (double x = from; x <= to + 1e-3 * step; x += step) {
        double d = x - x0;
        s.x.push_back(x);
        s.y.push_back(A * (1 - V * sinc(d / sigma) * std::cos(2 * std::numbers::pi * d / lambda + phase)));
    }
    return s;
}

Series dip(double V, double fwhm, double x0, double A, double from, double to, std::size_t n) {
    Series s;
    double sg = fwhm_to_sigma(fwhm);
    for (std::size_t k = 0; k < n; k++) {
        double x = from + (to - from) * static_cast<double>(k) / static_cast<double>(n - 1);
        s.x.push_back(x);
        s.y.push_back(A * (1 - V * std::exp(-(x - x0) * (x - x0) / (2 * sg * sg))));
    }
    return s;
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

const SourceBudget kReferenceBudget{95e3, 91e3, 0.37, 0.3, 0.047, 2.68, std::nullopt};

// Fine scan around the centre, Poisson counts, accidentals subtracted.
Series noisy_fine_fringe(double V, std::uint64_t seed, double &accidental_counts) {
    double sigma = 0.137e-3 / std::numbers::pi;
    Series clean = sinc_fringe(V, sigma, 1570e-9, 0, 0, 1, -3e-6, 3e-6, 0.15e-6);
    Interferogram g;
    g.axes.push_back({"delta_x2", clean.x.front(), 0.15e-6, clean.x.size()});
    for (double p : clean.y) {
        g.values.push_back(p);
    }
    auto noisy = rate_to_counts(g, kReferenceBudget, DetectorConfig{}, 10, seed);
    accidental_counts = kReferenceBudget.accidental_rate_for(DetectorConfig{}) * 10;
    Series out;
    out.x = clean.x;
    out.y = subtract_accidentals(*noisy.counts, kReferenceBudget.accidental_rate_for(DetectorConfig{}), 10);
    return out;
}

FringeFitOptions fine_options() {
    FringeFitOptions o;
    o.sigma_guess = 0.137e-3 / std::numbers::pi;
    o.fix_sigma = true;
    o.center_guess = 0;
    o.fix_center = true;
    return o;
}

}  // namespace

TEST(levenberg_marquardt, linear_problem_and_covariance) {
    // y = a + b x with known noise-free data plus one perturbed point.
    std::vector<double> xs{0, 1, 2, 3, 4, 5}, ys{1, 3, 5, 7, 9, 11.5};
    LmProblem prob;
    prob.initial = Eigen::Vector2d(0, 0);
    prob.lower = Eigen::Vector2d::Constant(-1e9);
    prob.upper = Eigen::Vector2d::Constant(1e9);
    prob.scale = Eigen::Vector2d::Ones();
    prob.residual = [&](const Eigen::VectorXd &p, Eigen::VectorXd &r, Eigen::MatrixXd &J) {
        r.resize(6);
        J.resize(6, 2);
        for (int i = 0; i < 6; i++) {
            r(i) = p(0) + p(1) * xs[i] - ys[i];
            J(i, 0) = 1;
            J(i, 1) = xs[i];
        }
    };
    auto res = levenberg_marquardt(prob);
    // Normal-equation oracle.
    Eigen::MatrixXd X(6, 2);
    Eigen::VectorXd Y(6);
    for (int i = 0; i < 6; i++) {
        X(i, 0) = 1;
        X(i, 1) = xs[i];
        Y(i) = ys[i];
    }
    Eigen::VectorXd beta = (X.transpose() * X).inverse() * X.transpose() * Y;
    ASSERT_NEAR(res.params(0), beta(0), 1e-9);
    ASSERT_NEAR(res.params(1), beta(1), 1e-9);
    double s2 = (X * beta - Y).squaredNorm() / 4;
    Eigen::MatrixXd cov = (X.transpose() * X).inverse() * s2;
    ASSERT_NEAR(res.covariance(1, 1), cov(1, 1), 1e-9);
}

TEST(levenberg_marquardt, non_convergence_reports_last_iterate) {
    LmProblem prob;
    prob.initial = Eigen::VectorXd::Constant(1, 5.0);
    prob.lower = Eigen::VectorXd::Constant(1, -1e9);
    prob.upper = Eigen::VectorXd::Constant(1, 1e9);
    prob.scale = Eigen::VectorXd::Constant(1, 1e-30);
    prob.residual = [](const Eigen::VectorXd &p, Eigen::VectorXd &r, Eigen::MatrixXd &J) {
        r = Eigen::VectorXd::Constant(3, std::exp(p(0)));
        J = Eigen::MatrixXd::Constant(3, 1, std::exp(p(0)));
    };
    LmOptions opt;
    opt.max_iterations = 5;
    try {
        levenberg_marquardt(prob, opt);
        FAIL();
    } catch (const FitError &e) {
        ASSERT_EQ(e.kind, FitFailure::NonConvergence);
        ASSERT_EQ(e.last_iterate.size(), 1u);
        ASSERT_LT(e.last_iterate[0], 5.0);
    }
}

TEST(fit_fringe, noiseless_generator_recovery) {
    auto s = sinc_fringe(0.9, 44.9e-6, 1570e-9, 0, 0, 1, -150e-6, 150e-6, 0.25e-6);
    auto f = fit_fringe(s.x, s.y);
    ASSERT_LT(rel(f.visibility, 0.9), 1e-6);
    ASSERT_LT(rel(f.wavelength, 1570e-9), 1e-6);
    ASSERT_LT(rel(f.sigma_x, 44.9e-6), 1e-6);
    ASSERT_LT(rel(f.amplitude, 1), 1e-6);
    ASSERT_LT(std::abs(f.center), 1e-6 * 1570e-9);
    ASSERT_LT(std::abs(f.phase), 1e-6);
}

TEST(fit_fringe, parameter_lattice_round_trip) {
    struct P {
        double V, sigma, lambda, x0, phase, A;
    };
    std::vector<P> lattice{{0.2, 30e-6, 1530e-9, 3e-6, 0.4, 2.0},
                           {0.5, 44.9e-6, 1570e-9, -10e-6, -1.0, 0.5},
                           {0.75, 60e-6, 1550e-9, 0.0, 2.5, 1200.0},
                           {0.95, 25e-6, 1600e-9, 7.5e-6, -2.9, 1.0},
                           {1.0, 80e-6, 1500e-9, -20e-6, 0.0, 30.0}};
    for (const auto &p : lattice) {
        auto s = sinc_fringe(p.V, p.sigma, p.lambda, p.x0, p.phase, p.A, -250e-6, 250e-6, 0.3e-6);
        auto f = fit_fringe(s.x, s.y);
        ASSERT_LT(rel(f.visibility, p.V), 1e-6);
        ASSERT_LT(rel(f.wavelength, p.lambda), 1e-6);
        ASSERT_LT(rel(f.sigma_x, p.sigma), 1e-6);
        ASSERT_LT(rel(f.amplitude, p.A), 1e-6);
        // Centre and phase trade off along the carrier; compare the combined phase at x = 0.
        double got = -2 * std::numbers::pi * f.center / f.wavelength + f.phase;
        double want = -2 * std::numbers::pi * p.x0 / p.lambda + p.phase;
        ASSERT_LT(std::abs(std::remainder(got - want, 2 * std::numbers::pi)), 1e-5);
        ASSERT_LT(std::abs(f.center - p.x0), 1e-6 * p.sigma);
    }
}

TEST(fit_fringe, fixed_parameters_stay_fixed) {
    auto s = sinc_fringe(0.8, 44.9e-6, 1570e-9, 0, 0.3, 1, -4e-6, 4e-6, 0.1e-6);
    FringeFitOptions o;
    o.sigma_guess = 44.9e-6;
    o.fix_sigma = true;
    o.center_guess = 0;
    o.fix_center = true;
    auto f = fit_fringe(s.x, s.y, o);
    ASSERT_EQ(f.sigma_x, 44.9e-6);
    ASSERT_EQ(f.center, 0.0);
    ASSERT_EQ(f.sigma_x_err, 0.0);
    ASSERT_LT(rel(f.visibility, 0.8), 1e-6);
    FringeFitOptions missing;
    missing.fix_sigma = true;
    ASSERT_THROW(fit_fringe(s.x, s.y, missing), InvalidArgument);
}

TEST(fit_fringe, insufficient_data) {
    auto s = sinc_fringe(0.8, 44.9e-6, 1570e-9, 0, 0, 1, 0, 1e-6, 0.1e-6);
    FringeFitOptions o;
    o.period_guess = 1570e-9;
    try {
        fit_fringe(s.x, s.y, o);
        FAIL();
    } catch (const FitError &e) {
        ASSERT_EQ(e.kind, FitFailure::InsufficientData);
    }
    std::vector<double> few{1, 2, 3};
    ASSERT_THROW(fit_fringe(few, few), FitError);
}

TEST(fit_fringe, noisy_fine_scan_visibility) {
    double acc = 0;
    auto s = noisy_fine_fringe(0.9957, 21, acc);
    auto f = fit_fringe(s.x, s.y, fine_options());
    ASSERT_LT(std::abs(f.visibility - 0.9957), 0.011);
    ASSERT_GT(f.visibility_err, 0.0);
    ASSERT_LE(f.visibility, 1 + 3 * f.visibility_err);
}

TEST(fit_fringe, rate_to_counts_recovers_true_visibility) {
    double mean = 0, mean_err = 0;
    for (std::uint64_t seed = 1; seed <= 10; seed++) {
        double acc = 0;
        auto s = noisy_fine_fringe(0.995, seed, acc);
        auto f = fit_fringe(s.x, s.y, fine_options());
        ASSERT_LT(std::abs(f.visibility - 0.995), 4 * f.visibility_err) << seed;
        mean += f.visibility / 10;
        mean_err += f.visibility_err / 10;
    }
    ASSERT_LT(std::abs(mean - 0.995), mean_err);
}

TEST(fit_fringe, noise_calibration) {
    std::vector<double> vs;
    double reported = 0;
    for (std::uint64_t seed = 100; seed < 150; seed++) {
        double acc = 0;
        auto s = noisy_fine_fringe(0.9, seed, acc);
        auto f = fit_fringe(s.x, s.y, fine_options());
        vs.push_back(f.visibility);
        reported += f.visibility_err / 50;
    }
    double m = std::accumulate(vs.begin(), vs.end(), 0.0) / 50;
    double var = 0;
    for (double v : vs) {
        var += (v - m) * (v - m) / 49;
    }
    double spread = std::sqrt(var);
    ASSERT_GT(spread, reported / 2);
    ASSERT_LT(spread, reported * 2);
}

TEST(fit_fringe, noise_never_lowers_residual) {
    double sigma = 0.137e-3 / std::numbers::pi;
    auto clean = sinc_fringe(0.9, sigma, 1570e-9, 0, 0, 40000, -3e-6, 3e-6, 0.15e-6);
    auto f0 = fit_fringe(clean.x, clean.y, fine_options());
    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 5; rep++) {
        auto noisy = clean;
        for (auto &v : noisy.y) {
            std::poisson_distribution<long> d(v);
            v = static_cast<double>(d(rng));
        }
        auto f = fit_fringe(noisy.x, noisy.y, fine_options());
        ASSERT_GE(f.residual_rms, f0.residual_rms);
    }
}

TEST(fit_dip, noiseless_recovery) {
    auto s = dip(0.33, 0.95e-3, 0.1e-3, 5000, -4e-3, 4e-3, 161);
    auto f = fit_dip(s.x, s.y);
    ASSERT_LT(rel(f.visibility, 0.33), 1e-6);
    ASSERT_LT(rel(f.fwhm, 0.95e-3), 1e-6);
    ASSERT_LT(std::abs(f.center - 0.1e-3), 1e-6 * 0.95e-3);
    ASSERT_LT(rel(f.amplitude, 5000), 1e-6);
}

TEST(fit_dip, parameter_lattice_round_trip) {
    for (auto [V, w, c] : std::vector<std::tuple<double, double, double>>{
             {0.05, 1e-3, 0}, {0.2, 0.5e-3, 0.3e-3}, {0.33, 1.45e-3, -0.2e-3}, {0.6, 0.3e-3, 0}, {0.9, 2e-3, 1e-3}}) {
        auto s = dip(V, w, c, 1, -5e-3, 5e-3, 201);
        auto f = fit_dip(s.x, s.y);
        ASSERT_LT(rel(f.visibility, V), 1e-6);
        ASSERT_LT(rel(f.fwhm, w), 1e-6);
        ASSERT_LT(std::abs(f.center - c), 1e-6 * w);
    }
}

TEST(fit_dip, flat_data_does_not_crash) {
    std::vector<double> x, y;
    std::mt19937_64 rng(2);
    std::normal_distribution<double> noise(0, 1);
    for (int k = 0; k < 60; k++) {
        x.push_back(k * 1e-5);
        y.push_back(1000 + noise(rng));
    }
    auto f = fit_dip(x, y);
    ASSERT_LT(std::abs(f.visibility), 0.01);
    ASSERT_GT(f.visibility_err, std::abs(f.visibility) / 3);

    std::vector<double> flat(60, 7.0);
    auto g = fit_dip(x, flat);
    ASSERT_NEAR(g.visibility, 0.0, 1e-12);
}

TEST(fit_envelope, round_trip) {
    for (auto [P, c, w] : std::vector<std::tuple<double, double, double>>{
             {1, 0, 1.17e-3}, {0.5, 0.2e-3, 0.8e-3}, {0.99, -0.4e-3, 1.5e-3}, {0.1, 0, 2e-3}, {0.7, 0.1e-3, 1e-3}}) {
        std::vector<double> x, v;
        double s = fwhm_to_sigma(w);
        for (int k = -20; k <= 20; k++) {
            x.push_back(k * 0.1e-3);
            v.push_back(P * std::exp(-(x.back() - c) * (x.back() - c) / (2 * s * s)));
        }
        auto f = fit_envelope(x, v);
        ASSERT_LT(rel(f.peak_visibility, P), 1e-6);
        ASSERT_LT(rel(f.fwhm, w), 1e-6);
        ASSERT_LT(std::abs(f.center - c), 1e-6 * w);
    }
}

TEST(fringe_period, cosine_recovery) {
    std::vector<double> x, y;
    for (int k = 0; k < 400; k++) {
        x.push_back(k * 0.11e-6);
        y.push_back(std::cos(2 * std::numbers::pi * x.back() / 1570e-9));
    }
    ASSERT_LT(rel(fringe_period(x, y), 1570e-9), 0.005);
    // Descending coordinates give the same period.
    std::reverse(x.begin(), x.end());
    std::reverse(y.begin(), y.end());
    ASSERT_LT(rel(fringe_period(x, y), 1570e-9), 0.005);
}

TEST(fringe_period, eight_period_accuracy_over_phases) {
    for (double phase : {0.0, 0.7, 2.0}) {
        for (double periods : {8.0, 8.5, 13.3}) {
            std::vector<double> x, y;
            int n = 120;
            for (int k = 0; k < n; k++) {
                x.push_back(k * periods * 1.0 / n);
                y.push_back(3 + std::cos(2 * std::numbers::pi * x.back() + phase));
            }
            ASSERT_LT(rel(fringe_period(x, y), 1.0), 0.005) << phase << " " << periods;
        }
    }
}

TEST(fringe_period, white_noise_has_no_period) {
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> d(0, 1);
        std::vector<double> x, y;
        for (int k = 0; k < 1024; k++) {
            x.push_back(k);
            y.push_back(d(rng));
        }
        try {
            fringe_period(x, y);
            FAIL() << seed;
        } catch (const FitError &e) {
            ASSERT_EQ(e.kind, FitFailure::NoPeriod);
        }
    }
}

TEST(fringe_period, rejects_nonuniform) {
    std::vector<double> x{0, 1, 2, 3, 4, 5, 6, 7.5}, y{0, 1, 0, 1, 0, 1, 0, 1};
    ASSERT_THROW(fringe_period(x, y), InvalidArgument);
}
