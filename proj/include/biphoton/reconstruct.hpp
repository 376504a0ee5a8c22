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

#ifndef BIPHOTON_RECONSTRUCT_HPP
#define BIPHOTON_RECONSTRUCT_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "biphoton/interferometer.hpp"
#include "biphoton/spectrum.hpp"

namespace biphoton {

/// Delay sampling of a 2D interferogram, in seconds, with increasing steps.
struct DelayLattice {
    enum class Symmetry {
        /// Both axes symmetric about 0.
        Full,
        /// Axis 1 starts at 0, axis 2 symmetric; the other half follows from R(-t) = R(t).
        HalfPlane,
    };

    AxisSpec axis1;
    AxisSpec axis2;

    /// Throws InvalidArgument unless the lattice holds the origin and has a usable symmetry.
    Symmetry symmetry() const;
    void validate() const { (void)symmetry(); }

    /// Odd-count lattice spanning +-half_span on both axes with the given steps.
    static DelayLattice symmetric(double half_span1, double step1, double half_span2, double step2);
};

enum class Window { None, Hann };

std::string to_string(Window w);

struct ReconstructOptions {
    Window window = Window::None;
    /// Band-pass path: accepts steps coarser than nyquist_step as long as no alias image of the
    /// band lands inside it.
    bool demodulate = false;
};

struct JsiEstimate {
    /// Normalized to unit integral, then clipped at zero.
    JointSpectrum spectrum;
    /// Negative mass over total absolute mass before clipping.
    double negative_fraction = 0;
    Window window = Window::None;
    /// Integral of the transform before normalization.
    double raw_integral = 0;
    /// Set when the transform carries no usable weight (e.g. G == 1); the spectrum is then all zeros.
    bool degenerate = false;
};

/// Re-expresses a 2D interferogram on increasing delay axes in seconds. Path-length axes named
/// delta_x1 / delta_x2 (metres) map to tau_S = dx1 / c and tau_L = -dx2 / c.
Interferogram canonical_delay_axes(const Interferogram &ifg);

DelayLattice lattice_of(const Interferogram &ifg);

/// pi / omega_max over both band axes.
double nyquist_step(const FrequencyGrid &band);

/// Step in the middle of the coarsest sampling-rate interval that keeps every alias image of
/// [axis.min, axis.max] off the band.
double bandpass_step(const FrequencyAxis &axis);

/// Throws AliasingError naming the first axis whose step is too coarse.
void check_sampling(const DelayLattice &lattice, const FrequencyGrid &band, bool demodulate);

/// Inverse cosine transform of 1 - G onto the band grid.
JsiEstimate reconstruct_jsi(const Interferogram &interferogram, const FrequencyGrid &band,
                            const ReconstructOptions &options = {});

/// ||estimate - truth|| / ||truth|| over the band grid.
double relative_l2(const JointSpectrum &estimate, const JointSpectrum &truth);

/// Forward-simulates the interferogram on `lattice`, reconstructs on `grid` and compares with
/// the sampled JSI.
double roundtrip_error(const BiphotonAmplitude &model, const std::optional<SpectralFilter> &filter1,
                       const std::optional<SpectralFilter> &filter2, const FrequencyGrid &grid,
                       const DelayLattice &lattice, const ReconstructOptions &options = {});

void write_jsi_csv(std::ostream &out, const JointSpectrum &spectrum, const std::vector<std::string> &extra_header = {});

}  // namespace biphoton

#endif
