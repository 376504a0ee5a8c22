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

#include "biphoton/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

namespace {

void validate_axis(const FrequencyAxis &axis, const char *name) {
    if (axis.count < 2) {
        throw InvalidArgument(std::string("frequency grid axis ") + name + " needs at least 2 cells");
    }
    if (!(axis.max > axis.min) || !std::isfinite(axis.min) || !std::isfinite(axis.max)) {
        throw InvalidArgument(std::string("frequency grid axis ") + name + " needs max > min");
    }
}

// Gaussian JSI exponent written in sum/difference coordinates so rho -> -1 stays accurate.
double gaussian_exponent(const GaussianModel &m, double omega1, double omega2) {
    double x = (omega1 - m.center1) / m.sigma1;
    double y = (omega2 - m.center2) / m.sigma2;
    double s = x + y;
    double d = x - y;
    return s * s / (4 * (1 + m.rho)) + d * d / (4 * (1 - m.rho));
}

cdouble interpolate(const GriddedModel &m, double omega1, double omega2) {
    const auto &a1 = m.grid.axis1();
    const auto &a2 = m.grid.axis2();
    if (!a1.contains(omega1) || !a2.contains(omega2)) {
        throw OutOfDomainError("gridded amplitude queried outside its grid");
    }
    auto locate = [](const FrequencyAxis &a, double w, std::size_t &lo, double &frac) {
        double u = (w - a.min) / a.spacing() - 0.5;
        double top = static_cast<double>(a.count - 1);
        u = std::clamp(u, 0.0, top);
        lo = std::min(static_cast<std::size_t>(u), a.count - 2);
        frac = u - static_cast<double>(lo);
    };
    std::size_t i, j;
    double fi, fj;
    locate(a1, omega1, i, fi);
    locate(a2, omega2, j, fj);
    const auto &v = m.values;
    const auto &g = m.grid;
    return (1 - fi) * (1 - fj) * v[g.index(i, j)] + (1 - fi) * fj * v[g.index(i, j + 1)] +
           fi * (1 - fj) * v[g.index(i + 1, j)] + fi * fj * v[g.index(i + 1, j + 1)];
}

// Axis whose cell edges land on the passband edges, padded by ~20% in total.
FrequencyAxis aligned_axis(const SpectralFilter &f, std::size_t n) {
    std::size_t pad = static_cast<std::size_t>(std::lround(static_cast<double>(n) * 0.1 / 1.2));
    pad = std::max<std::size_t>(pad, 1);
    std::size_t inside = n - 2 * pad;
    double cell = f.bandwidth / static_cast<double>(inside);
    double lo = f.passband_low() - static_cast<double>(pad) * cell;
    return FrequencyAxis{n, lo, lo + static_cast<double>(n) * cell};
}

FrequencyAxis gaussian_axis(double center, double sigma, const std::optional<SpectralFilter> &filter, std::size_t n) {
    double mean = center;
    double width = sigma;
    double half = 0;
    if (filter) {
        // Product of the JSI marginal and the filter's intensity transmission.
        double fs = fwhm_to_sigma(filter->bandwidth);
        double inv = 1 / (sigma * sigma) + 1 / (fs * fs);
        mean = (center / (sigma * sigma) + filter->center / (fs * fs)) / inv;
        width = 1 / std::sqrt(inv);
        half = 0.6 * filter->bandwidth;
    }
    half = std::max(half, 5 * width);
    return FrequencyAxis{n, mean - half, mean + half};
}

}  // namespace

FrequencyGrid::FrequencyGrid(FrequencyAxis axis1, FrequencyAxis axis2) : axis1_(axis1), axis2_(axis2) {
    validate_axis(axis1_, "omega1");
    validate_axis(axis2_, "omega2");
}

FrequencyGrid::FrequencyGrid(std::size_t n1, double omega1_min, double omega1_max, std::size_t n2,
                             double omega2_min, double omega2_max)
    : FrequencyGrid(FrequencyAxis{n1, omega1_min, omega1_max}, FrequencyAxis{n2, omega2_min, omega2_max}) {
}

SpectralFilter SpectralFilter::rectangular(double center, double full_width) {
    if (!(full_width > 0)) {
        throw InvalidArgument("filter bandwidth must be positive");
    }
    return SpectralFilter{Shape::Rectangular, center, full_width};
}

SpectralFilter SpectralFilter::gaussian(double center, double fwhm) {
    if (!(fwhm > 0)) {
        throw InvalidArgument("filter bandwidth must be positive");
    }
    return SpectralFilter{Shape::Gaussian, center, fwhm};
}

SpectralFilter SpectralFilter::from_wavelength(Shape shape, double center_wavelength_m, double width_m) {
    double center = wavelength_to_angular(center_wavelength_m);
    double width = wavelength_width_to_angular(width_m, center_wavelength_m);
    return shape == Shape::Rectangular ? rectangular(center, width) : gaussian(center, width);
}

double SpectralFilter::transmission(double omega) const {
    double offset = omega - center;
    if (shape == Shape::Rectangular) {
        return std::abs(offset) <= bandwidth / 2 ? 1.0 : 0.0;
    }
    // sqrt of exp(-4 ln2 offset^2 / fwhm^2)
    return std::exp(-2 * std::numbers::ln2 * offset * offset / (bandwidth * bandwidth));
}

BiphotonAmplitude::BiphotonAmplitude(std::variant<GaussianModel, GriddedModel> model, double phase)
    : model_(std::move(model)), global_phase_(phase) {
}

BiphotonAmplitude BiphotonAmplitude::gaussian(const GaussianModel &model, double global_phase) {
    if (!(model.sigma1 > 0) || !(model.sigma2 > 0)) {
        throw InvalidArgument("gaussian amplitude widths must be positive");
    }
    if (!(model.rho > -1 && model.rho < 1)) {
        throw InvalidArgument("gaussian correlation must lie strictly inside (-1, 1)");
    }
    return BiphotonAmplitude(model, global_phase);
}

BiphotonAmplitude BiphotonAmplitude::gridded(GriddedModel model, double global_phase) {
    if (model.values.size() != model.grid.size()) {
        throw DimensionError("gridded amplitude value count does not match its grid");
    }
    return BiphotonAmplitude(std::move(model), global_phase);
}

cdouble evaluate_amplitude(const BiphotonAmplitude &model, double omega1, double omega2) {
    cdouble phase = std::polar(1.0, model.global_phase());
    if (model.is_gaussian()) {
        // |phi|^2 is the correlated Gaussian density shape, so phi carries half its exponent.
        return phase * std::exp(-gaussian_exponent(model.gaussian_model(), omega1, omega2) / 2);
    }
    return phase * interpolate(model.gridded_model(), omega1, omega2);
}

double norm(const SampledAmplitude &amplitude) {
    double total = 0;
    for (const auto &v : amplitude.values) {
        total += std::norm(v);
    }
    return total * amplitude.grid.cell_area();
}

SampledAmplitude normalized(SampledAmplitude amplitude) {
    double n = norm(amplitude);
    if (!(n > 0) || !std::isfinite(n)) {
        throw EmptySupportError("spectral amplitude has no support on the grid");
    }
    double scale = 1 / std::sqrt(n);
    for (auto &v : amplitude.values) {
        v *= scale;
    }
    return amplitude;
}

SampledAmplitude apply_filter(SampledAmplitude amplitude, const SpectralFilter &filter, Arm arm) {
    const auto &g = amplitude.grid;
    for (std::size_t i = 0; i < g.n1(); i++) {
        for (std::size_t j = 0; j < g.n2(); j++) {
            double w = arm == Arm::One ? g.axis1().node(i) : g.axis2().node(j);
            amplitude.at(i, j) *= filter.transmission(w);
        }
    }
    return amplitude;
}

SampledAmplitude sample_on_grid(const BiphotonAmplitude &model, const FrequencyGrid &grid,
                                const std::optional<SpectralFilter> &filter1,
                                const std::optional<SpectralFilter> &filter2) {
    auto covers = [](const FrequencyAxis &a, const std::optional<SpectralFilter> &f) {
        return !f || f->shape != SpectralFilter::Shape::Rectangular ||
               (a.min <= f->passband_low() && a.max >= f->passband_high());
    };
    if (!covers(grid.axis1(), filter1) || !covers(grid.axis2(), filter2)) {
        throw InvalidArgument("frequency grid does not cover the filter passband");
    }
    SampledAmplitude out{grid, std::vector<cdouble>(grid.size())};
    std::vector<double> t1(grid.n1(), 1.0), t2(grid.n2(), 1.0);
    if (filter1) {
        for (std::size_t i = 0; i < grid.n1(); i++) {
            t1[i] = filter1->transmission(grid.axis1().node(i));
        }
    }
    if (filter2) {
        for (std::size_t j = 0; j < grid.n2(); j++) {
            t2[j] = filter2->transmission(grid.axis2().node(j));
        }
    }
    for (std::size_t i = 0; i < grid.n1(); i++) {
        double w1 = grid.axis1().node(i);
        for (std::size_t j = 0; j < grid.n2(); j++) {
            double t = t1[i] * t2[j];
            if (t == 0) {
                continue;
            }
            out.at(i, j) = t * evaluate_amplitude(model, w1, grid.axis2().node(j));
        }
    }
    return normalized(std::move(out));
}

JointSpectrum jsi(const SampledAmplitude &amplitude) {
    JointSpectrum out{amplitude.grid, std::vector<double>(amplitude.values.size())};
    std::transform(amplitude.values.begin(), amplitude.values.end(), out.values.begin(),
                   [](const cdouble &v) { return std::norm(v); });
    return out;
}

std::vector<double> marginal_spectrum(const JointSpectrum &spectrum, Arm arm) {
    const auto &g = spectrum.grid;
    if (arm == Arm::One) {
        std::vector<double> m(g.n1(), 0.0);
        for (std::size_t i = 0; i < g.n1(); i++) {
            for (std::size_t j = 0; j < g.n2(); j++) {
                m[i] += spectrum.at(i, j);
            }
            m[i] *= g.axis2().spacing();
        }
        return m;
    }
    std::vector<double> m(g.n2(), 0.0);
    for (std::size_t i = 0; i < g.n1(); i++) {
        for (std::size_t j = 0; j < g.n2(); j++) {
            m[j] += spectrum.at(i, j);
        }
    }
    for (auto &v : m) {
        v *= g.axis1().spacing();
    }
    return m;
}

SpectralMoments spectral_moments(const JointSpectrum &spectrum) {
    const auto &g = spectrum.grid;
    double w = 0, m1 = 0, m2 = 0;
    for (std::size_t i = 0; i < g.n1(); i++) {
        for (std::size_t j = 0; j < g.n2(); j++) {
            double p = spectrum.at(i, j);
            w += p;
            m1 += p * g.axis1().node(i);
            m2 += p * g.axis2().node(j);
        }
    }
    if (!(w > 0)) {
        throw EmptySupportError("joint spectrum has no weight");
    }
    m1 /= w;
    m2 /= w;
    double v1 = 0, v2 = 0, c12 = 0;
    for (std::size_t i = 0; i < g.n1(); i++) {
        double d1 = g.axis1().node(i) - m1;
        for (std::size_t j = 0; j < g.n2(); j++) {
            double p = spectrum.at(i, j);
            double d2 = g.axis2().node(j) - m2;
            v1 += p * d1 * d1;
            v2 += p * d2 * d2;
            c12 += p * d1 * d2;
        }
    }
    v1 /= w;
    v2 /= w;
    c12 /= w;
    return SpectralMoments{m1, m2, std::sqrt(v1), std::sqrt(v2), c12 / std::sqrt(v1 * v2)};
}

FrequencyGrid default_grid(const BiphotonAmplitude &model, const std::optional<SpectralFilter> &filter1,
                           const std::optional<SpectralFilter> &filter2, std::size_t n1, std::size_t n2) {
    auto axis_for = [&](const std::optional<SpectralFilter> &filter, Arm arm, std::size_t n) -> FrequencyAxis {
        if (filter && filter->shape == SpectralFilter::Shape::Rectangular) {
            return aligned_axis(*filter, n);
        }
        if (model.is_gaussian()) {
            const auto &g = model.gaussian_model();
            return arm == Arm::One ? gaussian_axis(g.center1, g.sigma1, filter, n)
                                   : gaussian_axis(g.center2, g.sigma2, filter, n);
        }
        return model.gridded_model().grid.axis(arm);
    };
    FrequencyAxis a1 = axis_for(filter1, Arm::One, n1);
    FrequencyAxis a2 = axis_for(filter2, Arm::Two, n2);
    a1.count = n1;
    a2.count = n2;
    return FrequencyGrid(a1, a2);
}

void SourceParams::validate() const {
    if (!(pump_pulse_fwhm > 0)) {
        throw InvalidArgument("pump pulse duration must be positive");
    }
    if (!(pump_center_wavelength > 0 && signal_wavelength > 0 && idler_wavelength > 0)) {
        throw InvalidArgument("wavelengths must be positive");
    }
    double lhs = 1 / signal_wavelength + 1 / idler_wavelength;
    double rhs = 1 / pump_center_wavelength;
    if (std::abs(lhs - rhs) > 1e-4 * rhs) {
        throw InvalidArgument("signal and idler centre frequencies do not add up to the pump frequency");
    }
}

double two_photon_coherence_length(const SourceParams &source, std::span<const double> gvd_spreads) {
    if (source.pump_pulse_fwhm < 0) {
        throw InvalidArgument("pump pulse duration must be non-negative");
    }
    double sq = source.pump_pulse_fwhm * source.pump_pulse_fwhm;
    for (double s : gvd_spreads) {
        if (s < 0) {
            throw InvalidArgument("GVD timing spreads must be non-negative");
        }
        sq += s * s;
    }
    return kSpeedOfLight * std::sqrt(sq);
}

GaussianModel pump_derived_model(const SourceParams &source, double coherence_length, double single_photon_fwhm) {
    source.validate();
    if (!(coherence_length > 0) || !(single_photon_fwhm > 0)) {
        throw InvalidArgument("coherence length and single-photon bandwidth must be positive");
    }
    double sigma = fwhm_to_sigma(single_photon_fwhm);
    // |Gamma| along the pair delay is the transform of the sum-frequency marginal.
    double sigma_sum = kGaussianFwhmPerSigma * kSpeedOfLight / coherence_length;
    double rho = sigma_sum * sigma_sum / (2 * sigma * sigma) - 1;
    if (!(rho > -1 && rho < 1)) {
        throw InvalidArgument("pump bandwidth is incompatible with the single-photon bandwidth");
    }
    return GaussianModel{wavelength_to_angular(source.signal_wavelength), wavelength_to_angular(source.idler_wavelength),
                         sigma, sigma, rho};
}

}  // namespace biphoton
