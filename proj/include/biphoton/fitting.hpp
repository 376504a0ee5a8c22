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

#ifndef BIPHOTON_FITTING_HPP
#define BIPHOTON_FITTING_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "biphoton/interferometer.hpp"

namespace biphoton {

struct LmOptions {
    std::size_t max_iterations = 200;
    /// Converged when max_i |step_i| / scale_i falls below this, or an accepted step lowers the
    /// residual sum of squares by less than 1e-12 relative.
    double tolerance = 1e-8;
};

struct LmResult {
    Eigen::VectorXd params;
    /// s^2 (J^T J)^-1 over all parameters; rows/columns of fixed parameters are zero.
    Eigen::MatrixXd covariance;
    double rss = 0;
    std::size_t iterations = 0;
};

/// Fills residuals (model - data) and the Jacobian of the model at `params`.
using ResidualFn = std::function<void(const Eigen::VectorXd &params, Eigen::VectorXd &residual,
                                      Eigen::MatrixXd &jacobian)>;

struct LmProblem {
    ResidualFn residual;
    Eigen::VectorXd initial;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    /// Typical magnitudes used to make the step test relative; must be positive.
    Eigen::VectorXd scale;
    std::vector<bool> fixed;
};

/// Damped Gauss-Newton with Marquardt diagonal scaling and box clamping.
/// Throws FitError(NonConvergence) with the last iterate if the iteration budget runs out.
LmResult levenberg_marquardt(const LmProblem &problem, const LmOptions &options = {});

/// y = A [1 - V sinc((x - x0) / sigma_x) cos(2 pi (x - x0) / lambda + phase)] + offset
struct FringeFit {
    double amplitude = 0;
    double visibility = 0;
    double sigma_x = 0;
    double wavelength = 0;
    double phase = 0;
    double center = 0;
    double offset = 0;
    double residual_rms = 0;
    double amplitude_err = 0;
    double visibility_err = 0;
    double sigma_x_err = 0;
    double wavelength_err = 0;
    double phase_err = 0;
    double center_err = 0;
    std::size_t iterations = 0;
};

struct FringeFitOptions {
    std::optional<double> period_guess;
    std::optional<double> sigma_guess;
    std::optional<double> center_guess;
    /// Fixed parameters take their value from the matching guess, which must be set.
    bool fix_sigma = false;
    bool fix_center = false;
    /// Known additive offset B (e.g. 0 for accidental-subtracted counts).
    double offset = 0;
    LmOptions lm;
};

FringeFit fit_fringe(std::span<const double> x, std::span<const double> y, const FringeFitOptions &options = {});

double fringe_model(const FringeFit &fit, double x);

enum class DipShape {
    /// y = A [1 - V exp(-(x - x0)^2 / 2 s^2)]
    Gaussian,
    /// y = A [1 - V sinc^2((x - x0) / s)], the dip of a rectangular passband
    SincSquared,
};

struct DipFit {
    DipShape shape = DipShape::Gaussian;
    double amplitude = 0;
    double visibility = 0;
    double fwhm = 0;
    double center = 0;
    double residual_rms = 0;
    double amplitude_err = 0;
    double visibility_err = 0;
    double fwhm_err = 0;
    double center_err = 0;
};

DipFit fit_dip(std::span<const double> x, std::span<const double> y, const LmOptions &options = {},
              DipShape shape = DipShape::Gaussian);

/// Gaussian P exp(-(x - c)^2 / 2 s^2) through visibility-vs-coordinate points.
struct EnvelopeFit {
    double peak_visibility = 0;
    double center = 0;
    double fwhm = 0;
    double residual_rms = 0;
    double peak_visibility_err = 0;
    double center_err = 0;
    double fwhm_err = 0;
};

EnvelopeFit fit_envelope(std::span<const double> x, std::span<const double> v, const LmOptions &options = {});

struct SliceVisibility {
    double coordinate = 0;
    bool ok = false;
    double visibility = 0;
    double visibility_err = 0;
    /// Fitted fringe centre along the fringe axis.
    double center = 0;
    std::string error;
};

struct VisibilityEnvelope {
    std::vector<SliceVisibility> slices;
    EnvelopeFit fit;
};

/// Fits a fringe along `fringe_axis` in every slice of a 2D interferogram and a Gaussian through
/// the resulting visibilities against the other axis' coordinate. Failed slices are recorded and
/// skipped; more than half failing is an error.
VisibilityEnvelope visibility_envelope(const Interferogram &scan, DelayAxis fringe_axis,
                                       const FringeFitOptions &slice_options = {});

/// Pearson correlation of the two axis coordinates of a 2D interferogram weighted by (1 - G)^2.
/// Near 0 when the interference pattern factorizes over the axes.
double diagonal_correlation(const Interferogram &scan);

/// Dominant period of uniformly sampled data from a Hann-windowed, zero-padded spectrum with
/// parabolic peak interpolation. Throws FitError(NoPeriod) when no peak stands above the floor.
double fringe_period(std::span<const double> x, std::span<const double> y);

}  // namespace biphoton

#endif
