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

#ifndef BIPHOTON_SPECTRUM_HPP
#define BIPHOTON_SPECTRUM_HPP

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace biphoton {

using cdouble = std::complex<double>;

enum class Arm { One = 1, Two = 2 };

/// Uniform midpoint axis: `count` cells over [min, max], nodes at cell centres.
struct FrequencyAxis {
    std::size_t count = 0;
    double min = 0;
    double max = 0;

    double spacing() const { return (max - min) / static_cast<double>(count); }
    double node(std::size_t i) const { return min + (static_cast<double>(i) + 0.5) * spacing(); }
    bool contains(double omega) const { return omega >= min && omega <= max; }
    bool operator==(const FrequencyAxis &) const = default;
};

/// Rectangular lattice over (omega1, omega2) in rad/s. Values stored row-major with omega2 fastest.
class FrequencyGrid {
   public:
    FrequencyGrid(FrequencyAxis axis1, FrequencyAxis axis2);
    FrequencyGrid(std::size_t n1, double omega1_min, double omega1_max, std::size_t n2, double omega2_min,
                  double omega2_max);

    const FrequencyAxis &axis1() const { return axis1_; }
    const FrequencyAxis &axis2() const { return axis2_; }
    const FrequencyAxis &axis(Arm arm) const { return arm == Arm::One ? axis1_ : axis2_; }
    std::size_t n1() const { return axis1_.count; }
    std::size_t n2() const { return axis2_.count; }
    std::size_t size() const { return n1() * n2(); }
    double cell_area() const { return axis1_.spacing() * axis2_.spacing(); }
    std::size_t index(std::size_t i, std::size_t j) const { return i * n2() + j; }

    bool operator==(const FrequencyGrid &) const = default;

   private:
    FrequencyAxis axis1_;
    FrequencyAxis axis2_;
};

template <typename T>
struct SpectralGrid {
    FrequencyGrid grid;
    std::vector<T> values;

    T &at(std::size_t i, std::size_t j) { return values[grid.index(i, j)]; }
    const T &at(std::size_t i, std::size_t j) const { return values[grid.index(i, j)]; }
};

/// Complex amplitude sampled on a grid. After `sample_on_grid` it is normalized so that
/// sum |phi|^2 * cell_area == 1.
using SampledAmplitude = SpectralGrid<cdouble>;
/// Joint spectral intensity |phi|^2 on a grid.
using JointSpectrum = SpectralGrid<double>;

/// Per-arm passband. Rectangular: `bandwidth` is the full width and the transmission is exactly
/// 1 inside, 0 outside. Gaussian: `bandwidth` is the FWHM of the intensity transmission; the
/// amplitude factor is its square root.
struct SpectralFilter {
    enum class Shape { Rectangular, Gaussian };

    Shape shape = Shape::Rectangular;
    double center = 0;
    double bandwidth = 0;

    static SpectralFilter rectangular(double center, double full_width);
    static SpectralFilter gaussian(double center, double fwhm);
    /// Converts a wavelength-domain specification (centre and width in metres).
    static SpectralFilter from_wavelength(Shape shape, double center_wavelength_m, double width_m);

    /// Amplitude transmission at `omega`.
    double transmission(double omega) const;
    double passband_low() const { return center - bandwidth / 2; }
    double passband_high() const { return center + bandwidth / 2; }
};

/// Correlated 2D Gaussian joint spectrum. `sigma1`, `sigma2` and `rho` are the standard
/// deviations and correlation coefficient of the JSI |phi|^2 (not of the amplitude).
struct GaussianModel {
    double center1 = 0;
    double center2 = 0;
    double sigma1 = 0;
    double sigma2 = 0;
    double rho = 0;
};

struct GriddedModel {
    FrequencyGrid grid;
    std::vector<cdouble> values;
};

/// Spectral amplitude phi(omega1, omega2) of a photon pair.
class BiphotonAmplitude {
   public:
    static BiphotonAmplitude gaussian(const GaussianModel &model, double global_phase = 0);
    static BiphotonAmplitude gridded(GriddedModel model, double global_phase = 0);

    bool is_gaussian() const { return std::holds_alternative<GaussianModel>(model_); }
    const GaussianModel &gaussian_model() const { return std::get<GaussianModel>(model_); }
    const GriddedModel &gridded_model() const { return std::get<GriddedModel>(model_); }
    double global_phase() const { return global_phase_; }

   private:
    BiphotonAmplitude(std::variant<GaussianModel, GriddedModel> model, double phase);

    std::variant<GaussianModel, GriddedModel> model_;
    double global_phase_ = 0;
};

/// Evaluates phi at one point. The Gaussian model has unit peak magnitude; gridded models are
/// bilinearly interpolated and throw OutOfDomainError outside their grid.
cdouble evaluate_amplitude(const BiphotonAmplitude &model, double omega1, double omega2);

/// Samples phi * F1(omega1) * F2(omega2) on `grid` and renormalizes to a unit discrete JSI.
/// Throws EmptySupportError if nothing survives the filters and InvalidArgument if the grid does
/// not cover a rectangular passband.
SampledAmplitude sample_on_grid(const BiphotonAmplitude &model, const FrequencyGrid &grid,
                                const std::optional<SpectralFilter> &filter1,
                                const std::optional<SpectralFilter> &filter2);

/// Multiplies one arm by a filter's amplitude transmission, without renormalizing.
SampledAmplitude apply_filter(SampledAmplitude amplitude, const SpectralFilter &filter, Arm arm);

/// Rescales so sum |phi|^2 * cell_area == 1. Throws EmptySupportError on an all-zero grid.
SampledAmplitude normalized(SampledAmplitude amplitude);

/// Sum of |phi|^2 * cell_area.
double norm(const SampledAmplitude &amplitude);

JointSpectrum jsi(const SampledAmplitude &amplitude);

/// Integrates the JSI over the other arm; the result integrates to the JSI total.
std::vector<double> marginal_spectrum(const JointSpectrum &spectrum, Arm arm);

/// Intensity-weighted moments of a joint spectrum.
struct SpectralMoments {
    double mean1 = 0;
    double mean2 = 0;
    double std1 = 0;
    double std2 = 0;
    double correlation = 0;
};

SpectralMoments spectral_moments(const JointSpectrum &spectrum);

/// Default sampling grid: a rectangular passband is padded by 20% with its edges on cell
/// boundaries; otherwise the axis spans +-5 sigma of the (filtered) marginal.
FrequencyGrid default_grid(const BiphotonAmplitude &model, const std::optional<SpectralFilter> &filter1,
                           const std::optional<SpectralFilter> &filter2, std::size_t n1 = 256,
                           std::size_t n2 = 256);

/// Pump and centre wavelengths of a pulsed down-conversion source.
struct SourceParams {
    double pump_center_wavelength = 0;
    double pump_pulse_fwhm = 0;
    double signal_wavelength = 0;
    double idler_wavelength = 0;

    /// Throws InvalidArgument unless 1/l_s + 1/l_i = 1/l_p within 1e-4 and the pulse width is >= 0.
    void validate() const;
};

/// c * sqrt(pump_fwhm^2 + sum gvd_i^2): pump coherence with timing spreads in quadrature.
double two_photon_coherence_length(const SourceParams &source, std::span<const double> gvd_spreads = {});

/// Gaussian JSI with equal single-arm widths whose sum-frequency spread gives a Gamma envelope of
/// FWHM `coherence_length` along the pair delay, and whose unfiltered single-arm FWHM is
/// `single_photon_fwhm` (rad/s).
GaussianModel pump_derived_model(const SourceParams &source, double coherence_length, double single_photon_fwhm);

}  // namespace biphoton

#endif
