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


#include "biphoton/interferometer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

using namespace biphoton;

namespace {

GaussianModel model(double rho) {
    return GaussianModel{wavelength_to_angular(1530e-9), wavelength_to_angular(1570e-9), 4e12, 3e12, rho};
}

SampledAmplitude sampled(const GaussianModel &m, std::size_t n = 128) {
    auto amp = BiphotonAmplitude::gaussian(m);
    return sample_on_grid(amp, default_grid(amp, std::nullopt, std::nullopt, n, n), std::nullopt, std::nullopt);
}

// Flat spectrum on arm 1's grid extent, 18 nm rectangular filter on arm 2.
SampledAmplitude flat_filtered(std::size_t n2 = 256) {
    auto f = SpectralFilter::from_wavelength(SpectralFilter::Shape::Rectangular, 1570e-9, 18e-9);
    FrequencyGrid base(4, f.center - 2 * f.bandwidth, f.center + 2 * f.bandwidth, 4, f.center - f.bandwidth,
                       f.center + f.bandwidth);
    auto flat = BiphotonAmplitude::gridded(GriddedModel{base, std::vector<cdouble>(16, 1.0)});
    auto grid = default_grid(flat, std::nullopt, f, 16, n2);
    return sample_on_grid(flat, grid, std::nullopt, f);
}

}  // namespace

TEST(delay_config, path_difference_mapping) {
    auto d = DelayConfig::from_path_differences(3e-4, 2e-4);
    ASSERT_NEAR(d.delta_tau_S(), 3e-4 / kSpeedOfLight, 1e-25);
    ASSERT_NEAR(d.delta_tau_L(), -2e-4 / kSpeedOfLight, 1e-25);
    DelayConfig e{1, 0.25, 3, 5};
    ASSERT_EQ(e.delta_tau_S(), 0.75);
    ASSERT_EQ(e.delta_tau_L(), -2);
    auto ax = path_axis_to_delay(DelayAxis::L, AxisSpec{-1e-3, 1e-6, 10});
    ASSERT_NEAR(ax.start, 1e-3 / kSpeedOfLight, 1e-25);
    ASSERT_NEAR(ax.step, -1e-6 / kSpeedOfLight, 1e-28);
}

TEST(gamma, identical_sources_at_origin) {
    for (double rho : {0.0, -0.9, 0.5}) {
        auto phi = sampled(model(rho));
        cdouble g = gamma(phi, phi, 0, 0);
        ASSERT_NEAR(g.real(), 1.0, 1e-10);
        ASSERT_NEAR(g.imag(), 0.0, 1e-10);
    }
}

TEST(gamma, bounded_by_one) {
    auto phi = sampled(model(-0.6), 64);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(-2e-12, 2e-12);
    for (int k = 0; k < 200; k++) {
        ASSERT_LE(std::abs(gamma(phi, phi, d(rng), d(rng))), 1 + 1e-10);
    }
}

TEST(gamma, hermitian_symmetry) {
    auto phi = sampled(model(-0.9), 96);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-1e-12, 1e-12);
    for (int k = 0; k < 50; k++) {
        double a = d(rng), b = d(rng);
        cdouble plus = gamma(phi, phi, a, b);
        cdouble minus = gamma(phi, phi, -a, -b);
        ASSERT_NEAR(minus.real(), plus.real(), 1e-12);
        ASSERT_NEAR(minus.imag(), -plus.imag(), 1e-12);
    }
}

TEST(gamma, separable_gaussian_transform_pair) {
    auto m = model(0);
    FrequencyGrid wide(160, m.center1 - 8 * m.sigma1, m.center1 + 8 * m.sigma1, 160, m.center2 - 8 * m.sigma2,
                       m.center2 + 8 * m.sigma2);
    auto phi = sample_on_grid(BiphotonAmplitude::gaussian(m), wide, std::nullopt, std::nullopt);
    for (double a : {0.0, 1e-13, -2.5e-13, 4e-13}) {
        for (double b : {0.0, 2e-13, -5e-13}) {
            cdouble g = gamma(phi, phi, a, b);
            double mag = std::exp(-m.sigma1 * m.sigma1 * a * a / 2) * std::exp(-m.sigma2 * m.sigma2 * b * b / 2);
            ASSERT_NEAR(std::abs(g), mag, 1e-6);
            cdouble expected = std::polar(mag, -(m.center1 * a + m.center2 * b));
            ASSERT_NEAR(std::abs(g - expected), 0.0, 1e-6);
        }
    }
}

TEST(gamma, mismatched_grids) {
    auto a = sampled(model(0), 64);
    auto b = sampled(model(0), 32);
    ASSERT_THROW(gamma(a, b, 0, 0), DimensionError);
    ASSERT_THROW(coincidence_rate(a, b, 0, 0), DimensionError);
}

TEST(gamma, factorization_for_separable_source) {
    auto phi = sampled(model(0), 128);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-3e-13, 3e-13);
    for (int k = 0; k < 40; k++) {
        double a = d(rng), b = d(rng);
        cdouble full = gamma(phi, phi, a, b);
        cdouble prod = gamma(phi, phi, a, 0) * gamma(phi, phi, 0, b);
        ASSERT_LT(std::abs(full - prod), 1e-6 * std::abs(full) + 1e-300);
    }
}

TEST(gamma, quadrature_convergence_under_doubling) {
    for (double rho : {0.0, -0.9}) {
        auto m = model(rho);
        auto amp = BiphotonAmplitude::gaussian(m);
        auto coarse = sampled(m, 128);
        auto fine = sampled(m, 256);
        for (double a : {0.0, 2e-13, -6e-13}) {
            for (double b : {1e-13, -3e-13}) {
                ASSERT_LT(std::abs(gamma(coarse, coarse, a, b) - gamma(fine, fine, a, b)), 1e-5);
            }
        }
    }
}

TEST(gamma_lattice, agrees_with_direct_sum) {
    auto phiA = sampled(model(-0.7), 48);
    auto phiB = phiA;
    for (std::size_t k = 0; k < phiB.values.size(); k++) {
        phiB.values[k] *= std::polar(1.0, 0.001 * static_cast<double>(k % 17));
    }
    AxisSpec s{-4e-13, 1.3e-13, 7};
    AxisSpec l{-2e-13, 0.7e-13, 9};
    auto lat = gamma_lattice(phiA, phiB, s, l);
    for (std::size_t i = 0; i < s.count; i++) {
        for (std::size_t j = 0; j < l.count; j++) {
            cdouble direct = gamma(phiA, phiB, s.at(i), l.at(j));
            ASSERT_LT(std::abs(lat[i * l.count + j] - direct), 1e-12);
        }
    }
}

TEST(coincidence_rate, limits) {
    auto phi = sampled(model(-0.5));
    ASSERT_NEAR(coincidence_rate(phi, phi, 0, 0), 0.0, 1e-10);
    ASSERT_NEAR(coincidence_rate(phi, phi, 5e-11, -7e-11), 1.0, 1e-3);
}

TEST(coincidence_rate, values_in_range) {
    auto phi = sampled(model(0.3), 64);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> d(-1e-12, 1e-12);
    for (int k = 0; k < 300; k++) {
        double g = coincidence_rate(phi, phi, d(rng), d(rng));
        ASSERT_GE(g, 0.0);
        ASSERT_LE(g, 2.0);
    }
}

TEST(coincidence_rate, separable_period_is_arm_two_carrier) {
    auto m = model(0);
    auto phi = sampled(m, 128);
    // 1D trace along L; plain DFT over candidate frequencies.
    const std::size_t n = 2048;
    const double dt = 0.25e-15;
    auto scan = scan_1d(phi, phi, DelayAxis::L, 0, -dt * n / 2, dt, n);
    double best = 0;
    std::size_t best_k = 0;
    for (std::size_t k = 1; k < n / 2; k++) {
        cdouble acc = 0;
        for (std::size_t t = 0; t < n; t++) {
            acc += (scan.values[t] - 1) * std::polar(1.0, -2 * std::numbers::pi * double(k * t) / double(n));
        }
        if (std::abs(acc) > best) {
            best = std::abs(acc);
            best_k = k;
        }
    }
    double bin = 1 / (n * dt);
    ASSERT_LE(std::abs(best_k * bin - m.center2 / (2 * std::numbers::pi)), bin);
}

TEST(hom_fringe_analytic, examples) {
    double lambda = 1570e-9;
    double sigma = 0.141e-3 / std::numbers::pi;
    ASSERT_EQ(hom_fringe_analytic(1, sigma, lambda, 0), 0.0);
    double u = (lambda / 2) / sigma;
    double expected = 0.5 * (1 + std::sin(u) / u);
    ASSERT_NEAR(hom_fringe_analytic(1, sigma, lambda, lambda / 2), expected, 1e-15);
    ASSERT_NEAR(expected, 0.99997, 1e-5);
    ASSERT_NEAR(hom_fringe_analytic(1, sigma, lambda, 1.0), 0.5, 1e-4);
    ASSERT_THROW(hom_fringe_analytic(1.2, sigma, lambda, 0), InvalidArgument);
    ASSERT_THROW(hom_fringe_analytic(1, 0, lambda, 0), InvalidArgument);
}

TEST(hom_fringe_analytic, range) {
    for (double x = -1e-3; x < 1e-3; x += 1.37e-7) {
        double p = hom_fringe_analytic(0.8, 44.9e-6, 1570e-9, x);
        ASSERT_GE(p, 0.0);
        ASSERT_LE(p, 1.0);
    }
}

TEST(sinc, small_argument_branch_is_continuous) {
    for (double u : {0.0, 1e-9, 9.99e-5, 1e-4, 1.01e-4, 0.3}) {
        double exact = u == 0 ? 1.0 : std::sin(u) / u;
        ASSERT_NEAR(sinc(u), exact, 1e-16);
    }
}

TEST(hom_generalized, standard_dip_and_quadrature) {
    auto env = gaussian_envelope(1e-12);
    ASSERT_EQ(hom_generalized(1, env, 0, 0, 0), 0.0);
    for (double t : {0.0, 1e-13, 3e-12}) {
        ASSERT_EQ(hom_generalized(0.7, env, 1e13, t, std::numbers::pi / 2),
                  0.5 * (1 - 0.7 * env(t) * std::cos(1e13 * t) * std::cos(std::numbers::pi / 2)));
        ASSERT_NEAR(hom_generalized(0.7, env, 1e13, t, std::numbers::pi / 2), 0.5, 1e-16);
    }
    ASSERT_NEAR(env(0.5e-12), 0.5, 1e-14);
}

TEST(hom_generalized, nondegenerate_beat_period) {
    double dw = wavelength_to_angular(1530e-9) - wavelength_to_angular(1570e-9);
    ASSERT_NEAR(dw / (2 * std::numbers::pi), 5.0e12, 0.01e12);
    double period_m = 2 * std::numbers::pi * kSpeedOfLight / dw;
    ASSERT_NEAR(period_m, 1530e-9 * 1570e-9 / 40e-9, 1e-12);
    ASSERT_NEAR(period_m, 60e-6, 0.1e-6);
    auto flat = [](double) { return 1.0; };
    double t = length_to_delay(period_m);
    ASSERT_NEAR(hom_generalized(1, flat, dw, t, 0), hom_generalized(1, flat, dw, 0, 0), 1e-12);
    ASSERT_NEAR(hom_generalized(1, flat, dw, t / 2, 0), 1.0, 1e-12);
    // No beating without a frequency offset.
    ASSERT_EQ(hom_generalized(1, flat, 0, t / 2, 0), 0.0);
}

TEST(hom_generalized, sinc_envelope) {
    auto env = sinc_envelope(2e-13);
    ASSERT_EQ(env(0), 1.0);
    ASSERT_NEAR(env(std::numbers::pi * 2e-13), 0.0, 1e-15);
}

TEST(scan_1d, minimum_nearest_origin) {
    auto phi = sampled(model(-0.3));
    auto s = scan_1d(phi, phi, DelayAxis::L, 0, -1.01e-13, 0.2e-15, 1000);
    auto it = std::min_element(s.values.begin(), s.values.end());
    std::size_t k = static_cast<std::size_t>(it - s.values.begin());
    ASSERT_LT(std::abs(s.axes[0].at(k)), 0.2e-15);
    ASSERT_EQ(s.meta("fixed_axis"), "delta_tau_S");
    ASSERT_EQ(s.meta("identical_sources"), "true");
    s.validate();
}

TEST(scan_1d, matches_pointwise_rate_both_axes) {
    auto phi = sampled(model(-0.8), 64);
    for (DelayAxis axis : {DelayAxis::S, DelayAxis::L}) {
        auto s = scan_1d(phi, phi, axis, 1e-13, -3e-13, 1.1e-14, 60);
        for (std::size_t k = 0; k < 60; k++) {
            double t = s.axes[0].at(k);
            double direct = axis == DelayAxis::S ? coincidence_rate(phi, phi, t, 1e-13)
                                                 : coincidence_rate(phi, phi, 1e-13, t);
            ASSERT_NEAR(s.values[k], direct, 1e-12);
        }
    }
    ASSERT_THROW(scan_1d(phi, phi, DelayAxis::S, 0, 0, 1, 1), InvalidArgument);
}

TEST(scan_1d, offset_slice_keeps_period_and_loses_visibility) {
    auto m = model(0);
    auto phi = sampled(m, 128);
    double width = 1 / m.sigma2;
    auto at0 = scan_1d(phi, phi, DelayAxis::S, 0, -3e-14, 0.1e-15, 600);
    auto at1 = scan_1d(phi, phi, DelayAxis::S, width, -3e-14, 0.1e-15, 600);
    double ratio = std::abs(gamma(phi, phi, 0, width));
    ASSERT_NEAR(ratio, std::exp(-0.5), 1e-6);
    // Slice = 1 - Re[Gamma_1(tau) Gamma_2(w)]: same carrier in tau, contrast scaled by |Gamma_2(w)|.
    cdouble g2 = gamma(phi, phi, 0, width);
    for (std::size_t k = 0; k < 600; k++) {
        double t = at0.axes[0].at(k);
        cdouble g1 = gamma(phi, phi, t, 0);
        ASSERT_NEAR(at1.values[k], 1 - (g1 * g2).real(), 1e-9);
    }
    auto contrast = [](const Interferogram &s) {
        auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
        return *hi - *lo;
    };
    ASSERT_NEAR(contrast(at1) / contrast(at0), ratio, 2e-3);
}

TEST(scan_1d, rectangular_filter_matches_closed_form) {
    auto phi = flat_filtered();
    auto f = SpectralFilter::from_wavelength(SpectralFilter::Shape::Rectangular, 1570e-9, 18e-9);
    double sigma_x = 2 * kSpeedOfLight / f.bandwidth;
    ASSERT_NEAR(std::numbers::pi * sigma_x, 1570e-9 * 1570e-9 / 18e-9, 1e-12);
    double half = 3 * std::numbers::pi * sigma_x;
    double step = 0.05e-6;
    auto count = static_cast<std::size_t>(2 * half / step) + 1;
    auto s = scan_1d(phi, phi, DelayAxis::L, 0, path_axis_to_delay(DelayAxis::L, {-half, step, count}).start,
                     path_axis_to_delay(DelayAxis::L, {-half, step, count}).step, count);
    double worst = 0;
    for (std::size_t k = 0; k < count; k++) {
        double dx2 = -half + static_cast<double>(k) * step;
        worst = std::max(worst, std::abs(s.values[k] / 2 - hom_fringe_analytic(1, sigma_x, 1570e-9, dx2)));
    }
    ASSERT_LT(worst, 1e-3);
}

TEST(scan_2d, symmetric_under_joint_negation) {
    auto phi = sampled(model(-0.9), 96);
    AxisSpec s{-3e-13, 0.5e-13, 13};
    AxisSpec l{-2e-13, 0.25e-13, 17};
    auto scan = scan_2d(phi, phi, s, l);
    scan.validate();
    for (std::size_t i = 0; i < s.count; i++) {
        for (std::size_t j = 0; j < l.count; j++) {
            ASSERT_NEAR(scan.value(i, j), scan.value(s.count - 1 - i, l.count - 1 - j), 1e-10);
        }
    }
}

TEST(scan_2d, equals_pointwise_gamma) {
    auto phi = sampled(model(0.2), 64);
    AxisSpec s{-1e-13, 0.3e-13, 8};
    AxisSpec l{-1e-13, 0.21e-13, 11};
    auto scan = scan_2d(phi, phi, s, l);
    for (std::size_t i = 0; i < s.count; i++) {
        for (std::size_t j = 0; j < l.count; j++) {
            ASSERT_NEAR(1 - scan.value(i, j), gamma(phi, phi, s.at(i), l.at(j)).real(), 1e-12);
        }
    }
    ASSERT_THROW(scan_2d(phi, phi, AxisSpec{0, 1, 1}, l), InvalidArgument);
}

TEST(scan_2d, separable_envelope_is_axis_aligned) {
    auto phi = sampled(model(0), 96);
    AxisSpec s{-4e-13, 1e-13, 9};
    AxisSpec l{-4e-13, 1e-13, 9};
    auto scan = scan_2d(phi, phi, s, l);
    // |1 - G| has rank-one magnitude: |Gamma(a,b)| = |Gamma(a,0)| |Gamma(0,b)|.
    for (std::size_t i = 0; i < 9; i++) {
        for (std::size_t j = 0; j < 9; j++) {
            double full = std::abs(gamma(phi, phi, s.at(i), l.at(j)));
            double prod = std::abs(gamma(phi, phi, s.at(i), 0)) * std::abs(gamma(phi, phi, 0, l.at(j)));
            ASSERT_NEAR(full, prod, 1e-9);
        }
    }
}

TEST(symmetrized_gamma, equals_gamma_for_symmetric_source) {
    double c = wavelength_to_angular(1550e-9);
    GaussianModel m{c, c, 3e12, 3e12, -0.6};
    auto phi = sampled(m, 96);
    ASSERT_EQ(phi.grid.axis1(), phi.grid.axis2());
    for (double a : {0.0, 1e-13, -2e-13}) {
        for (double b : {0.0, 3e-13}) {
            ASSERT_LT(std::abs(symmetrized_gamma(phi, a, b) - gamma(phi, phi, a, b)), 1e-10);
        }
    }
}

TEST(symmetrized_gamma, disjoint_passbands_vanish) {
    auto f1 = SpectralFilter::from_wavelength(SpectralFilter::Shape::Rectangular, 1530e-9, 18e-9);
    auto f2 = SpectralFilter::from_wavelength(SpectralFilter::Shape::Rectangular, 1570e-9, 18e-9);
    auto amp = BiphotonAmplitude::gaussian(GaussianModel{f1.center, f2.center, 5e12, 5e12, -0.9});
    double lo = f2.passband_low() - 0.1 * f2.bandwidth;
    double hi = f1.passband_high() + 0.1 * f1.bandwidth;
    FrequencyGrid shared(256, lo, hi, 256, lo, hi);
    auto phi = sample_on_grid(amp, shared, f1, f2);
    ASSERT_NEAR(std::abs(gamma(phi, phi, 0, 0)), 1.0, 1e-10);
    ASSERT_LT(std::abs(symmetrized_gamma(phi, 0, 0)), 1e-3);
}

TEST(symmetrized_gamma, separable_symmetric_factorizes) {
    double c = wavelength_to_angular(1550e-9);
    GaussianModel m{c, c, 3e12, 3e12, 0};
    auto phi = sampled(m, 96);
    // Independent 1D overlaps of the arm marginal amplitudes.
    const auto &ax = phi.grid.axis1();
    auto one_d = [&](double tau) {
        cdouble acc = 0;
        for (std::size_t i = 0; i < ax.count; i++) {
            double z = (ax.node(i) - c) / m.sigma1;
            acc += std::exp(-z * z / 2) * std::polar(1.0, -ax.node(i) * tau);
        }
        return acc * ax.spacing();
    };
    double norm1 = one_d(0).real();
    for (double a : {0.0, 1e-13}) {
        for (double b : {-2e-13, 0.5e-13}) {
            cdouble expected = one_d(a) * one_d(b) / (norm1 * norm1);
            ASSERT_LT(std::abs(symmetrized_gamma(phi, a, b) - expected), 1e-10);
        }
    }
}

TEST(symmetrized_gamma, needs_identical_axes) {
    auto phi = sampled(model(0), 32);
    ASSERT_THROW(symmetrized_gamma(phi, 0, 0), DimensionError);
}

TEST(interferogram, validate_rejects_bad_shapes) {
    Interferogram ifg;
    ASSERT_THROW(ifg.validate(), DimensionError);
    ifg.axes.push_back({"x", 0, 1, 3});
    ifg.values = {0, 1};
    ASSERT_THROW(ifg.validate(), DimensionError);
    ifg.values = {0, 1, 2.5};
    ASSERT_THROW(ifg.validate(), InvalidArgument);
    ifg.values = {0, 1, 2};
    ifg.validate();
    ifg.axes[0].step = 0;
    ASSERT_THROW(ifg.validate(), DimensionError);
}

TEST(interferogram_csv, round_trip_is_exact) {
    auto phi = sampled(model(-0.4), 32);
    auto scan = scan_2d(phi, phi, AxisSpec{-1e-13, 0.37e-13, 5}, AxisSpec{-2e-13, 0.91e-13, 4});
    scan.counts = std::vector<double>(scan.values.size(), 17);
    scan.seed = 42;
    std::stringstream buf;
    write_interferogram_csv(buf, scan, {"fit visibility=0.5"});
    std::string text = buf.str();
    ASSERT_NE(text.find("# axis1 delta_tau_S,-1e-13,"), std::string::npos);
    ASSERT_NE(text.find("# seed=42"), std::string::npos);
    auto back = read_interferogram_csv(buf);
    ASSERT_EQ(back.values, scan.values);
    ASSERT_EQ(back.counts, scan.counts);
    ASSERT_EQ(back.seed, scan.seed);
    ASSERT_EQ(back.axes.size(), 2u);
    ASSERT_EQ(back.axes[1].step, scan.axes[1].step);
    ASSERT_EQ(back.meta("identical_sources"), "true");
    std::stringstream again;
    write_interferogram_csv(again, back);
    std::stringstream first;
    write_interferogram_csv(first, scan, {"fit visibility=0.5"});
    ASSERT_EQ(again.str(), first.str());
}

TEST(interferogram_csv, rejects_malformed_rows) {
    std::stringstream bad("# axis1 x,0,1,2\n0,0.5\n1,abc\n");
    ASSERT_THROW(read_interferogram_csv(bad), InvalidArgument);
    std::stringstream short_rows("# axis1 x,0,1,3\n0,0.5\n1,0.5\n");
    ASSERT_THROW(read_interferogram_csv(short_rows), DimensionError);
}
