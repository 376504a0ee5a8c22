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

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

namespace {

// sinc(u)^2 = 1/2
constexpr double kSincSquaredHalf = 1.3915573782515103;


constexpr double kTwoPi = 2 * std::numbers::pi;
// sinc(u) = 1/2
constexpr double kSincHalf = 1.8954942670339809;

double clamp_to(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// d/du sin(u)/u
double sinc_prime(double u) {
    if (std::abs(u) < 1e-3) {
        double u2 = u * u;
        return -u / 3 + u * u2 / 30;
    }
    return (std::cos(u) - std::sin(u) / u) / u;
}

void require_matching(std::span<const double> x, std::span<const double> y, std::size_t min_points) {
    if (x.size() != y.size()) {
        throw DimensionError("x and y differ in length");
    }
    if (x.size() < min_points) {
        throw FitError(FitFailure::InsufficientData,
                       "need at least " + std::to_string(min_points) + " points, got " + std::to_string(x.size()));
    }
}

double err_of(const LmResult &r, int i) {
    double v = r.covariance(i, i);
    return v >= 0 ? std::sqrt(v) : std::numeric_limits<double>::infinity();
}

double wrap_phase(double p) {
    p = std::remainder(p, kTwoPi);
    return p;
}

struct FftwPlanGuard {
    fftw_plan plan;
    ~FftwPlanGuard() { fftw_destroy_plan(plan); }
};

}  // namespace

LmResult levenberg_marquardt(const LmProblem &problem, const LmOptions &options) {
    const Eigen::Index np = problem.initial.size();
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < np; i++) {
        if (problem.fixed.empty() || !problem.fixed[static_cast<std::size_t>(i)]) {
            free.push_back(i);
        }
    }
    const auto nf = static_cast<Eigen::Index>(free.size());

    Eigen::VectorXd p = problem.initial.cwiseMax(problem.lower).cwiseMin(problem.upper);
    Eigen::VectorXd r, r_try;
    Eigen::MatrixXd J, J_try;
    problem.residual(p, r, J);
    const Eigen::Index n = r.size();
    if (n <= nf) {
        throw FitError(FitFailure::InsufficientData, "fewer data points than free parameters");
    }
    double rss = r.squaredNorm();
    double lambda = 1e-3;

    auto reduced = [&](const Eigen::MatrixXd &full) {
        Eigen::MatrixXd out(full.rows(), nf);
        for (Eigen::Index k = 0; k < nf; k++) {
            out.col(k) = full.col(free[static_cast<std::size_t>(k)]);
        }
        return out;
    };

    std::size_t it = 0;
    bool converged = nf == 0 || !std::isfinite(rss) || rss == 0;
    while (!converged) {
        if (it >= options.max_iterations) {
            std::vector<double> last(p.data(), p.data() + np);
            throw FitError(FitFailure::NonConvergence,
                           "no convergence after " + std::to_string(options.max_iterations) + " iterations", last);
        }
        it++;
        Eigen::MatrixXd Jf = reduced(J);
        Eigen::MatrixXd A = Jf.transpose() * Jf;
        Eigen::VectorXd g = Jf.transpose() * r;
        Eigen::VectorXd diag = A.diagonal();
        double floor = std::max(diag.maxCoeff(), 1e-300) * 1e-15;
        diag = diag.cwiseMax(floor);

        // Parameters pinned at a bound with the descent direction pointing outward sit out this step.
        std::vector<bool> pinned(static_cast<std::size_t>(nf), false);
        for (Eigen::Index k = 0; k < nf; k++) {
            auto idx = free[static_cast<std::size_t>(k)];
            bool at_upper = p(idx) >= problem.upper(idx) && g(k) < 0;
            bool at_lower = p(idx) <= problem.lower(idx) && g(k) > 0;
            pinned[static_cast<std::size_t>(k)] = at_upper || at_lower;
        }

        while (true) {
            Eigen::MatrixXd damped = A;
            damped.diagonal() += lambda * diag;
            Eigen::VectorXd rhs = -g;
            for (Eigen::Index k = 0; k < nf; k++) {
                if (pinned[static_cast<std::size_t>(k)]) {
                    damped.row(k).setZero();
                    damped.col(k).setZero();
                    damped(k, k) = 1;
                    rhs(k) = 0;
                }
            }
            Eigen::VectorXd step = damped.ldlt().solve(rhs);
            Eigen::VectorXd trial = p;
            for (Eigen::Index k = 0; k < nf; k++) {
                auto idx = free[static_cast<std::size_t>(k)];
                trial(idx) = clamp_to(p(idx) + step(k), problem.lower(idx), problem.upper(idx));
            }
            double rel = 0;
            for (Eigen::Index k = 0; k < nf; k++) {
                auto idx = free[static_cast<std::size_t>(k)];
                rel = std::max(rel, std::abs(trial(idx) - p(idx)) / problem.scale(idx));
            }
            problem.residual(trial, r_try, J_try);
            double rss_try = r_try.squaredNorm();
            if (std::isfinite(rss_try) && rss_try <= rss) {
                double gain = rss - rss_try;
                bool stalled = gain <= 1e-12 * rss;
                p = trial;
                r = r_try;
                J = J_try;
                rss = rss_try;
                lambda = std::max(lambda / 10, 1e-12);
                converged = rel < options.tolerance || rss == 0 || stalled;
                break;
            }
            lambda *= 10;
            if (rel < options.tolerance || lambda > 1e20) {
                // No downhill step even at a vanishing step size: already at the minimum.
                converged = true;
                break;
            }
        }
    }

    LmResult out;
    out.params = p;
    out.rss = rss;
    out.iterations = it;
    out.covariance = Eigen::MatrixXd::Zero(np, np);
    if (nf > 0) {
        Eigen::MatrixXd Jf = reduced(J);
        Eigen::MatrixXd A = Jf.transpose() * Jf;
        double s2 = rss / static_cast<double>(n - nf);
        // Invert the unit-diagonal form so parameter units do not decide rank.
        Eigen::VectorXd d = A.diagonal().cwiseSqrt();
        bool zero_column = (d.array() <= 0).any();
        Eigen::VectorXd inv_d = d.cwiseInverse();
        Eigen::MatrixXd scaled = inv_d.asDiagonal() * A * inv_d.asDiagonal();
        Eigen::FullPivLU<Eigen::MatrixXd> lu(scaled);
        lu.setThreshold(1e-12);
        Eigen::MatrixXd cov;
        if (!zero_column && lu.isInvertible()) {
            cov = inv_d.asDiagonal() * lu.inverse() * inv_d.asDiagonal() * s2;
        } else {
            cov = Eigen::MatrixXd::Constant(nf, nf, std::numeric_limits<double>::infinity());
        }
        for (Eigen::Index a = 0; a < nf; a++) {
            for (Eigen::Index b = 0; b < nf; b++) {
                out.covariance(free[static_cast<std::size_t>(a)], free[static_cast<std::size_t>(b)]) = cov(a, b);
            }
        }
    }
    return out;
}

double fringe_model(const FringeFit &f, double x) {
    double d = x - f.center;
    return f.amplitude * (1 - f.visibility * sinc(d / f.sigma_x) * std::cos(kTwoPi * d / f.wavelength + f.phase)) +
           f.offset;
}

FringeFit fit_fringe(std::span<const double> x, std::span<const double> y, const FringeFitOptions &options) {
    require_matching(x, y, 8);
    if ((options.fix_sigma && !options.sigma_guess) || (options.fix_center && !options.center_guess)) {
        throw InvalidArgument("a fixed fringe parameter needs its value");
    }
    const std::size_t n = x.size();
    auto [xmin_it, xmax_it] = std::minmax_element(x.begin(), x.end());
    const double span = *xmax_it - *xmin_it;
    const double B = options.offset;

    double period = options.period_guess ? *options.period_guess : fringe_period(x, y);
    if (!(period > 0) || span < period) {
        throw FitError(FitFailure::InsufficientData, "scan spans less than one fringe period");
    }

    // Local contrast over a one-period window; the fringe centre is where it peaks.
    double dx = span / static_cast<double>(n - 1);
    auto w = static_cast<std::size_t>(std::max(2.0, std::ceil(period / dx)));
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; k++) {
        order[k] = k;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> xs(n), ys(n);
    for (std::size_t k = 0; k < n; k++) {
        xs[k] = x[order[k]];
        ys[k] = y[order[k]];
    }
    std::vector<double> contrast(n, 0.0);
    for (std::size_t k = 0; k < n; k++) {
        std::size_t lo = k >= w / 2 ? k - w / 2 : 0;
        std::size_t hi = std::min(n - 1, lo + w);
        auto [mn, mx] = std::minmax_element(ys.begin() + static_cast<std::ptrdiff_t>(lo),
                                            ys.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
        contrast[k] = *mx - *mn;
    }
    auto peak = static_cast<std::size_t>(std::max_element(contrast.begin(), contrast.end()) - contrast.begin());
    double x0 = options.center_guess ? *options.center_guess : xs[peak];

    double sigma;
    if (options.sigma_guess) {
        sigma = *options.sigma_guess;
    } else {
        double half = contrast[peak] / 2;
        double dist = std::numeric_limits<double>::infinity();
        for (std::size_t k = peak; k < n; k++) {
            if (contrast[k] < half) {
                dist = std::min(dist, xs[k] - xs[peak]);
                break;
            }
        }
        for (std::size_t k = peak + 1; k-- > 0;) {
            if (contrast[k] < half) {
                dist = std::min(dist, xs[peak] - xs[k]);
                break;
            }
        }
        sigma = std::isfinite(dist) ? std::max(dist, period) / kSincHalf : 10 * span;
    }

    // A, V, phase by linear least squares on [1, s cos, s sin].
    Eigen::MatrixXd M(n, 3);
    Eigen::VectorXd rhs(n);
    for (std::size_t k = 0; k < n; k++) {
        double d = x[k] - x0;
        double s = sinc(d / sigma);
        double t = kTwoPi * d / period;
        M(static_cast<Eigen::Index>(k), 0) = 1;
        M(static_cast<Eigen::Index>(k), 1) = s * std::cos(t);
        M(static_cast<Eigen::Index>(k), 2) = s * std::sin(t);
        rhs(static_cast<Eigen::Index>(k)) = y[k] - B;
    }
    Eigen::Vector3d lin = M.colPivHouseholderQr().solve(rhs);
    double A0 = lin(0);
    if (!(std::abs(A0) > 0)) {
        A0 = 1;
    }
    double AV = std::hypot(lin(1), lin(2));
    double V0 = AV / A0;
    double phi0 = std::atan2(lin(2), -lin(1));

    // p = [A, V, sigma, lambda, phase, x0]
    Eigen::VectorXd p0(6);
    p0 << A0, V0, sigma, period, phi0, x0;
    double big = std::numeric_limits<double>::max();
    LmProblem prob;
    prob.initial = p0;
    prob.lower = Eigen::VectorXd(6);
    prob.upper = Eigen::VectorXd(6);
    prob.lower << -big, -big, 1e-3 * dx, 0.5 * period, -big, *xmin_it - span;
    prob.upper << big, big, 1e3 * span, 2 * period, big, *xmax_it + span;
    prob.scale = Eigen::VectorXd(6);
    prob.scale << std::max(std::abs(A0), 1e-300), 1, sigma, period, 1, period;
    prob.fixed = {false, false, options.fix_sigma, false, false, options.fix_center};
    prob.residual = [&](const Eigen::VectorXd &p, Eigen::VectorXd &r, Eigen::MatrixXd &J) {
        r.resize(static_cast<Eigen::Index>(n));
        J.resize(static_cast<Eigen::Index>(n), 6);
        double A = p(0), V = p(1), sg = p(2), lam = p(3), ph = p(4), c = p(5);
        for (std::size_t k = 0; k < n; k++) {
            auto i = static_cast<Eigen::Index>(k);
            double d = x[k] - c;
            double u = d / sg;
            double S = sinc(u);
            double Sp = sinc_prime(u);
            double th = kTwoPi * d / lam + ph;
            double C = std::cos(th), Sn = std::sin(th);
            r(i) = A * (1 - V * S * C) + B - y[k];
            J(i, 0) = 1 - V * S * C;
            J(i, 1) = -A * S * C;
            J(i, 2) = A * V * C * Sp * u / sg;
            J(i, 3) = -A * V * S * Sn * kTwoPi * d / (lam * lam);
            J(i, 4) = A * V * S * Sn;
            J(i, 5) = A * V * (Sp * C / sg - S * Sn * kTwoPi / lam);
        }
    };
    LmResult res = levenberg_marquardt(prob, options.lm);

    FringeFit f;
    f.amplitude = res.params(0);
    f.visibility = res.params(1);
    f.sigma_x = res.params(2);
    f.wavelength = res.params(3);
    f.phase = res.params(4);
    f.center = res.params(5);
    f.offset = B;
    if (f.visibility < 0) {
        f.visibility = -f.visibility;
        f.phase += std::numbers::pi;
    }
    f.phase = wrap_phase(f.phase);
    f.residual_rms = std::sqrt(res.rss / static_cast<double>(n));
    f.amplitude_err = err_of(res, 0);
    f.visibility_err = err_of(res, 1);
    f.sigma_x_err = err_of(res, 2);
    f.wavelength_err = err_of(res, 3);
    f.phase_err = err_of(res, 4);
    f.center_err = err_of(res, 5);
    f.iterations = res.iterations;
    return f;
}

DipFit fit_dip(std::span<const double> x, std::span<const double> y, const LmOptions &options, DipShape shape) {
    const bool sinc2 = shape == DipShape::SincSquared;
    // Half-maximum point of the profile in units of its scale parameter.
    const double half_point = sinc2 ? kSincSquaredHalf : kGaussianFwhmPerSigma / 2;
    require_matching(x, y, 8);
    const std::size_t n = x.size();
    auto [xmin_it, xmax_it] = std::minmax_element(x.begin(), x.end());
    const double span = *xmax_it - *xmin_it;
    if (!(span > 0)) {
        throw FitError(FitFailure::InsufficientData, "dip scan has zero span");
    }

    // Baseline from the outer 10% of points on each side.
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; k++) {
        order[k] = k;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::size_t edge = std::max<std::size_t>(1, n / 10);
    double base = 0;
    for (std::size_t k = 0; k < edge; k++) {
        base += y[order[k]] + y[order[n - 1 - k]];
    }
    base /= static_cast<double>(2 * edge);
    if (!(std::abs(base) > 0)) {
        base = 1;
    }
    auto min_it = std::min_element(y.begin(), y.end());
    std::size_t kmin = static_cast<std::size_t>(min_it - y.begin());
    double V0 = 1 - *min_it / base;
    double x0 = x[kmin];
    double half = base * (1 - V0 / 2);
    double width = 0;
    for (std::size_t k = 0; k < n; k++) {
        if (y[k] <= half) {
            width = std::max(width, std::abs(x[k] - x0));
        }
    }
    double s0 = width > 0 ? width / half_point : span / 4;
    double dx = span / static_cast<double>(n - 1);

    // p = [A, V, s, x0]
    double big = std::numeric_limits<double>::max();
    LmProblem prob;
    prob.initial = Eigen::Vector4d(base, V0, s0, x0);
    // The dip must be bracketed by the data.
    prob.lower = Eigen::Vector4d(-big, -big, 0.1 * dx, *xmin_it);
    prob.upper = Eigen::Vector4d(big, big, span, *xmax_it);
    prob.scale = Eigen::Vector4d(std::abs(base), 1, s0, s0);
    prob.residual = [&](const Eigen::VectorXd &p, Eigen::VectorXd &r, Eigen::MatrixXd &J) {
        r.resize(static_cast<Eigen::Index>(n));
        J.resize(static_cast<Eigen::Index>(n), 4);
        double A = p(0), V = p(1), s = p(2), c = p(3);
        for (std::size_t k = 0; k < n; k++) {
            auto i = static_cast<Eigen::Index>(k);
            double d = x[k] - c;
            double g, dg_ds, dg_dc;
            if (sinc2) {
                double u = d / s;
                double sn = sinc(u);
                double dsn = sinc_prime(u);
                g = sn * sn;
                dg_ds = 2 * sn * dsn * (-d / (s * s));
                dg_dc = 2 * sn * dsn * (-1 / s);
            } else {
                g = std::exp(-d * d / (2 * s * s));
                dg_ds = g * d * d / (s * s * s);
                dg_dc = g * d / (s * s);
            }
            r(i) = A * (1 - V * g) - y[k];
            J(i, 0) = 1 - V * g;
            J(i, 1) = -A * g;
            J(i, 2) = -A * V * dg_ds;
            J(i, 3) = -A * V * dg_dc;
        }
    };
    LmResult res = levenberg_marquardt(prob, options);

    DipFit f;
    f.shape = shape;
    f.amplitude = res.params(0);
    f.visibility = res.params(1);
    f.fwhm = 2 * half_point * res.params(2);
    f.center = res.params(3);
    f.residual_rms = std::sqrt(res.rss / static_cast<double>(n));
    f.amplitude_err = err_of(res, 0);
    f.visibility_err = err_of(res, 1);
    f.fwhm_err = 2 * half_point * err_of(res, 2);
    f.center_err = err_of(res, 3);
    return f;
}

EnvelopeFit fit_envelope(std::span<const double> x, std::span<const double> v, const LmOptions &options) {
    require_matching(x, v, 4);
    const std::size_t n = x.size();
    auto [xmin_it, xmax_it] = std::minmax_element(x.begin(), x.end());
    const double span = *xmax_it - *xmin_it;
    auto peak_it = std::max_element(v.begin(), v.end());
    double P0 = *peak_it;
    double c0 = x[static_cast<std::size_t>(peak_it - v.begin())];
    double width = 0;
    for (std::size_t k = 0; k < n; k++) {
        if (v[k] >= P0 / 2) {
            width = std::max(width, std::abs(x[k] - c0));
        }
    }
    double s0 = width > 0 ? 2 * width / kGaussianFwhmPerSigma : span / 4;
    if (!(s0 > 0)) {
        throw FitError(FitFailure::InsufficientData, "envelope points have zero span");
    }

    double big = std::numeric_limits<double>::max();
    LmProblem prob;
    prob.initial = Eigen::Vector3d(P0, c0, s0);
    prob.lower = Eigen::Vector3d(-big, *xmin_it - span, 1e-6 * span);
    prob.upper = Eigen::Vector3d(big, *xmax_it + span, 100 * span);
    prob.scale = Eigen::Vector3d(std::max(std::abs(P0), 1e-300), s0, s0);
    prob.residual = [&](const Eigen::VectorXd &p, Eigen::VectorXd &r, Eigen::MatrixXd &J) {
        r.resize(static_cast<Eigen::Index>(n));
        J.resize(static_cast<Eigen::Index>(n), 3);
        for (std::size_t k = 0; k < n; k++) {
            auto i = static_cast<Eigen::Index>(k);
            double d = x[k] - p(1);
            double g = std::exp(-d * d / (2 * p(2) * p(2)));
            r(i) = p(0) * g - v[k];
            J(i, 0) = g;
            J(i, 1) = p(0) * g * d / (p(2) * p(2));
            J(i, 2) = p(0) * g * d * d / (p(2) * p(2) * p(2));
        }
    };
    LmResult res = levenberg_marquardt(prob, options);

    EnvelopeFit f;
    f.peak_visibility = res.params(0);
    f.center = res.params(1);
    f.fwhm = kGaussianFwhmPerSigma * res.params(2);
    f.residual_rms = std::sqrt(res.rss / static_cast<double>(n));
    f.peak_visibility_err = err_of(res, 0);
    f.center_err = err_of(res, 1);
    f.fwhm_err = kGaussianFwhmPerSigma * err_of(res, 2);
    return f;
}

VisibilityEnvelope visibility_envelope(const Interferogram &scan, DelayAxis fringe_axis,
                                       const FringeFitOptions &slice_options) {
    scan.validate();
    if (scan.rank() != 2) {
        throw DimensionError("visibility envelope needs a 2D interferogram");
    }
    // Axis 0 is the S delay, axis 1 the L delay.
    const std::size_t fringe_index = fringe_axis == DelayAxis::S ? 0 : 1;
    const auto &fax = scan.axes[fringe_index];
    const auto &cax = scan.axes[1 - fringe_index];

    std::vector<double> xs(fax.count);
    for (std::size_t k = 0; k < fax.count; k++) {
        xs[k] = fax.at(k);
    }
    VisibilityEnvelope out;
    std::vector<double> cs, vs;
    std::vector<double> ys(fax.count);
    for (std::size_t s = 0; s < cax.count; s++) {
        for (std::size_t k = 0; k < fax.count; k++) {
            ys[k] = fringe_index == 1 ? scan.value(s, k) : scan.value(k, s);
        }
        SliceVisibility sv;
        sv.coordinate = cax.at(s);
        try {
            FringeFit f = fit_fringe(xs, ys, slice_options);
            sv.ok = true;
            sv.visibility = f.visibility;
            sv.visibility_err = f.visibility_err;
            sv.center = f.center;
            cs.push_back(sv.coordinate);
            vs.push_back(sv.visibility);
        } catch (const Error &e) {
            sv.error = e.what();
        }
        out.slices.push_back(sv);
    }
    if (2 * cs.size() < cax.count) {
        throw FitError(FitFailure::InsufficientData,
                       std::to_string(cax.count - cs.size()) + " of " + std::to_string(cax.count) +
                           " slice fits failed");
    }
    out.fit = fit_envelope(cs, vs);
    return out;
}

double diagonal_correlation(const Interferogram &scan) {
    scan.validate();
    if (scan.rank() != 2) {
        throw DimensionError("diagonal correlation needs a 2D interferogram");
    }
    const auto &a = scan.axes[0];
    const auto &b = scan.axes[1];
    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < a.count; i++) {
        for (std::size_t j = 0; j < b.count; j++) {
            double r = 1 - scan.value(i, j);
            double w = r * r;
            sw += w;
            sx += w * a.at(i);
            sy += w * b.at(j);
        }
    }
    if (!(sw > 0)) {
        throw InvalidArgument("interferogram shows no interference");
    }
    double mx = sx / sw, my = sy / sw;
    double cxx = 0, cyy = 0, cxy = 0;
    for (std::size_t i = 0; i < a.count; i++) {
        for (std::size_t j = 0; j < b.count; j++) {
            double r = 1 - scan.value(i, j);
            double w = r * r;
            double dx = a.at(i) - mx, dy = b.at(j) - my;
            cxx += w * dx * dx;
            cyy += w * dy * dy;
            cxy += w * dx * dy;
        }
    }
    return cxy / std::sqrt(cxx * cyy);
}

double fringe_period(std::span<const double> x, std::span<const double> y) {
    require_matching(x, y, 8);
    const std::size_t n = x.size();
    double step = (x[n - 1] - x[0]) / static_cast<double>(n - 1);
    if (!(step != 0)) {
        throw InvalidArgument("fringe_period needs distinct sample positions");
    }
    for (std::size_t k = 1; k < n; k++) {
        if (std::abs((x[k] - x[k - 1]) - step) > 1e-6 * std::abs(step)) {
            throw InvalidArgument("fringe_period needs uniform sample spacing");
        }
    }
    double mean = 0;
    for (double v : y) {
        mean += v;
    }
    mean /= static_cast<double>(n);

    std::size_t padded = 1;
    while (padded < 8 * n) {
        padded <<= 1;
    }
    std::vector<double> in(padded, 0.0);
    for (std::size_t k = 0; k < n; k++) {
        double hann = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(k) / static_cast<double>(n - 1));
        in[k] = (y[k] - mean) * hann;
    }
    const std::size_t nb = padded / 2 + 1;
    auto *spec = static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * nb));
    {
        FftwPlanGuard guard{fftw_plan_dft_r2c_1d(static_cast<int>(padded), in.data(), spec, FFTW_ESTIMATE)};
        fftw_execute(guard.plan);
    }
    std::vector<double> power(nb);
    for (std::size_t k = 0; k < nb; k++) {
        power[k] = spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1];
    }
    fftw_free(spec);

    // Ignore periods longer than half the record.
    std::size_t kmin = std::max<std::size_t>(2 * padded / n, 1);
    if (kmin + 2 >= nb) {
        throw FitError(FitFailure::NoPeriod, "record too short for a period estimate");
    }
    auto peak_it = std::max_element(power.begin() + static_cast<std::ptrdiff_t>(kmin), power.end());
    auto kp = static_cast<std::size_t>(peak_it - power.begin());
    std::vector<double> sorted(power.begin() + static_cast<std::ptrdiff_t>(kmin), power.end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
    double median = sorted[sorted.size() / 2];
    if (!(*peak_it > 0) || *peak_it < 25 * median) {
        throw FitError(FitFailure::NoPeriod, "no spectral peak above the noise floor");
    }
    double kf = static_cast<double>(kp);
    if (kp > kmin && kp + 1 < nb && power[kp - 1] > 0 && power[kp + 1] > 0) {
        double a = std::log(power[kp - 1]), b = std::log(power[kp]), c = std::log(power[kp + 1]);
        double denom = a - 2 * b + c;
        if (denom < 0) {
            kf += 0.5 * (a - c) / denom;
        }
    }
    double freq = kf / (static_cast<double>(padded) * std::abs(step));
    return 1 / freq;
}

}  // namespace biphoton
