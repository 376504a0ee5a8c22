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

#ifndef BIPHOTON_UNITS_HPP
#define BIPHOTON_UNITS_HPP

#include <cmath>
#include <numbers>

namespace biphoton {

/// Vacuum speed of light (m/s). All time <-> length conversions use it.
inline constexpr double kSpeedOfLight = 299792458.0;

/// FWHM / rms ratio of a Gaussian, 2 sqrt(2 ln 2).
inline const double kGaussianFwhmPerSigma = 2.0 * std::sqrt(2.0 * std::numbers::ln2);

inline double wavelength_to_angular(double wavelength_m) {
    return 2.0 * std::numbers::pi * kSpeedOfLight / wavelength_m;
}

inline double angular_to_wavelength(double omega) {
    return 2.0 * std::numbers::pi * kSpeedOfLight / omega;
}

/// Linearized width conversion dw = 2 pi c dl / l^2 around `center_wavelength_m`.
inline double wavelength_width_to_angular(double width_m, double center_wavelength_m) {
    return 2.0 * std::numbers::pi * kSpeedOfLight * width_m / (center_wavelength_m * center_wavelength_m);
}

inline double fwhm_to_sigma(double fwhm) { return fwhm / kGaussianFwhmPerSigma; }
inline double sigma_to_fwhm(double sigma) { return sigma * kGaussianFwhmPerSigma; }

inline double delay_to_length(double seconds) { return seconds * kSpeedOfLight; }
inline double length_to_delay(double meters) { return meters / kSpeedOfLight; }

}  // namespace biphoton

#endif
