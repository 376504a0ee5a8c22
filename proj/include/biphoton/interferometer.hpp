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

#ifndef BIPHOTON_INTERFEROMETER_HPP
#define BIPHOTON_INTERFEROMETER_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "biphoton/spectrum.hpp"

namespace biphoton {

/// Optical delays of the four paths of the unfolded interferometer (seconds).
struct DelayConfig {
    double tau_SA = 0;
    double tau_SB = 0;
    double tau_LA = 0;
    double tau_LB = 0;

    double delta_tau_S() const { return tau_SA - tau_SB; }
    double delta_tau_L() const { return tau_LA - tau_LB; }

    /// Path-length differences dx1 (short arms) and dx2 (long arms) in metres, mapped with
    /// tau_S = dx1 / c and tau_L = -dx2 / c. Only the B paths carry the delay.
    static DelayConfig from_path_differences(double dx1, double dx2);
};

enum class DelayAxis { S, L };

struct AxisSpec {
    double start = 0;
    double step = 0;
    std::size_t count = 0;

    double at(std::size_t k) const { return start + static_cast<double>(k) * step; }
};

/// Converts a path-length axis (metres) to the matching delay axis (seconds).
AxisSpec path_axis_to_delay(DelayAxis axis, const AxisSpec &path_axis);

struct InterferogramAxis {
    std::string name;
    double start = 0;
    double step = 0;
    std::size_t count = 0;

    double at(std::size_t k) const { return start + static_cast<double>(k) * step; }
    AxisSpec spec() const { return AxisSpec{start, step, count}; }
};

/// Normalized coincidence rate G on a 1D or 2D lattice; the last axis varies fastest.
struct Interferogram {
    std::vector<InterferogramAxis> axes;
    std::vector<double> values;
    /// Noisy counts per lattice point, when produced by the counting model.
    std::optional<std::vector<double>> counts;
    std::optional<std::uint64_t> seed;
    std::vector<std::pair<std::string, std::string>> metadata;

    std::size_t rank() const { return axes.size(); }
    double value(std::size_t i, std::size_t j) const { return values[i * axes[1].count + j]; }
    std::optional<std::string> meta(const std::string &key) const;
    void set_meta(const std::string &key, const std::string &value);

    /// Throws if axes are degenerate, the value count is wrong, or a value leaves [0, 2].
    void validate() const;
};

/// Overlap integral sum phiA phiB^* exp(-i(omega1 dS + omega2 dL)) dw1 dw2 (midpoint rule).
cdouble gamma(const SampledAmplitude &phiA, const SampledAmplitude &phiB, double delta_tau_S, double delta_tau_L);

/// gamma on a full (S, L) lattice via separable partial sums; S is the outer index.
std::vector<cdouble> gamma_lattice(const SampledAmplitude &phiA, const SampledAmplitude &phiB, const AxisSpec &s_axis,
                                   const AxisSpec &l_axis);

/// G = 1 - Re gamma, in [0, 2].
double coincidence_rate(const SampledAmplitude &phiA, const SampledAmplitude &phiB, double delta_tau_S,
                        double delta_tau_L);

/// Unnormalized sinc, sin(u)/u with sinc(0) = 1.
double sinc(double u);

/// Relabels delta_tau_S / delta_tau_L axes as path differences delta_x1 = c tau_S and
/// delta_x2 = -c tau_L. Other axes pass through unchanged.
Interferogram with_path_axes(Interferogram ifg);

/// Closed-form phase-sensitive fringe: 0.5 [1 - V sinc(dx2 / sigma_x) cos(2 pi dx2 / lambda)].
double hom_fringe_analytic(double visibility, double sigma_x, double wavelength, double delta_x2);

/// Fringe envelope f(dt) with f(0) = 1.
using Envelope = std::function<double(double)>;

Envelope gaussian_envelope(double fwhm);
/// sinc(dt / width), the envelope of a rectangular passband of angular width 2 / width.
Envelope sinc_envelope(double width);

/// Coincidence probability 0.5 {1 - V f(dt) cos(d_omega dt) cos(theta)}.
double hom_generalized(double visibility, const Envelope &envelope, double delta_omega, double delta_t, double theta);

Interferogram scan_1d(const SampledAmplitude &phiA, const SampledAmplitude &phiB, DelayAxis axis,
                      double fixed_other_delay, double start, double step, std::size_t count);

Interferogram scan_2d(const SampledAmplitude &phiA, const SampledAmplitude &phiB, const AxisSpec &s_axis,
                      const AxisSpec &l_axis);

/// sum phi(w1, w2) phi^*(w2, w1) exp(-i(w1 tau1 + w2 tau2)). Both grid axes must be identical.
cdouble symmetrized_gamma(const SampledAmplitude &phi, double tau1, double tau2);

/// Writes `# axisK name,start,step,count` headers and `coord...,G[,counts]` rows at full precision.
void write_interferogram_csv(std::ostream &out, const Interferogram &ifg,
                             const std::vector<std::string> &extra_header = {});
Interferogram read_interferogram_csv(std::istream &in);

}  // namespace biphoton

#endif
