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

#include "biphoton/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool near_zero(double v, double step) { return std::abs(v) <= 1e-9 * std::abs(step); }

bool is_symmetric(const AxisSpec &a) {
    return a.count % 2 == 1 && near_zero(a.start + a.at(a.count - 1), a.step);
}

bool starts_at_zero(const AxisSpec &a) { return near_zero(a.start, a.step); }

double hann(double t, double half_width) {
    if (!(half_width > 0)) {
        return 1;
    }
    double u = std::min(std::abs(t) / half_width, 1.0);
    return 0.5 * (1 + std::cos(std::numbers::pi * u));
}

bool bandpass_ok(double a, double b, double step) {
    if (a <= 0) {
        return step <= std::numbers::pi / b;
    }
    double fs = 2 * std::numbers::pi / step;
    auto kmax = static_cast<long>(std::floor(b / (b - a)));
    for (long k = 1; k <= kmax; k++) {
        double lo = 2 * b / static_cast<double>(k);
        double hi = k == 1 ? INFINITY : 2 * a / static_cast<double>(k - 1);
        if (fs >= lo * (1 - 1e-12) && fs <= hi * (1 + 1e-12)) {
            return true;
        }
    }
    return false;
}

}  // namespace

DelayLattice::Symmetry DelayLattice::symmetry() const {
    for (const auto *a : {&axis1, &axis2}) {
        if (a->count < 2 || !(a->step > 0)) {
            throw DimensionError("delay lattice axes need at least 2 points and a positive step");
        }
    }
    bool s1 = is_symmetric(axis1), s2 = is_symmetric(axis2);
    bool z1 = starts_at_zero(axis1), z2 = starts_at_zero(axis2);
    if (s1 && s2) {
        return Symmetry::Full;
    }
    if (z1 && s2) {
        return Symmetry::HalfPlane;
    }
    if (z1 && z2) {
        throw InvalidArgument("a lattice starting at 0 on both axes misses the (+, -) quadrant");
    }
    if (z2 && s1) {
        throw InvalidArgument("half-plane lattices must start at 0 on axis 1");
    }
    throw InvalidArgument("delay lattice must contain the origin and be symmetric about it or start at 0");
}

DelayLattice DelayLattice::symmetric(double half_span1, double step1, double half_span2, double step2) {
    auto axis = [](double half, double step) {
        auto n = static_cast<std::size_t>(std::floor(half / step + 1e-9));
        return AxisSpec{-static_cast<double>(n) * step, step, 2 * n + 1};
    };
    return DelayLattice{axis(half_span1, step1), axis(half_span2, step2)};
}

std::string to_string(Window w) { return w == Window::Hann ? "hann" : "none"; }

Interferogram canonical_delay_axes(const Interferogram &ifg) {
    ifg.validate();
    if (ifg.rank() != 2) {
        throw DimensionError("reconstruction needs a 2D interferogram");
    }
    Interferogram out = ifg;
    for (std::size_t a = 0; a < 2; a++) {
        auto &ax = out.axes[a];
        if (ax.name == "delta_x1") {
            ax = InterferogramAxis{"delta_tau_S", length_to_delay(ax.start), length_to_delay(ax.step), ax.count};
        } else if (ax.name == "delta_x2") {
            ax = InterferogramAxis{"delta_tau_L", -length_to_delay(ax.start), -length_to_delay(ax.step), ax.count};
        }
    }
    const std::size_t n1 = out.axes[0].count, n2 = out.axes[1].count;
    bool flip1 = out.axes[0].step < 0, flip2 = out.axes[1].step < 0;
    if (flip1 || flip2) {
        std::vector<double> v(out.values.size());
        for (std::size_t i = 0; i < n1; i++) {
            for (std::size_t j = 0; j < n2; j++) {
                std::size_t si = flip1 ? n1 - 1 - i : i;
                std::size_t sj = flip2 ? n2 - 1 - j : j;
                v[i * n2 + j] = out.values[si * n2 + sj];
            }
        }
        out.values = std::move(v);
        out.counts.reset();
        for (std::size_t a = 0; a < 2; a++) {
            auto &ax = out.axes[a];
            if (ax.step < 0) {
                ax.start = ax.at(ax.count - 1);
                ax.step = -ax.step;
            }
        }
    }
    return out;
}

DelayLattice lattice_of(const Interferogram &ifg) {
    Interferogram c = canonical_delay_axes(ifg);
    return DelayLattice{c.axes[0].spec(), c.axes[1].spec()};
}

double nyquist_step(const FrequencyGrid &band) {
    double w = 0;
    for (const auto *a : {&band.axis1(), &band.axis2()}) {
        w = std::max({w, std::abs(a->min), std::abs(a->max)});
    }
    if (!(w > 0)) {
        throw InvalidArgument("band has no positive frequency edge");
    }
    return std::numbers::pi / w;
}

double bandpass_step(const FrequencyAxis &axis) {
    double a = axis.min, b = axis.max;
    if (a <= 0) {
        return std::numbers::pi / std::max(std::abs(a), std::abs(b));
    }
    auto k = static_cast<double>(std::floor(b / (b - a)));
    double fs = k == 1 ? 2 * b * 1.25 : 0.5 * (2 * b / k + 2 * a / (k - 1));
    return 2 * std::numbers::pi / fs;
}

void check_sampling(const DelayLattice &lattice, const FrequencyGrid &band, bool demodulate) {
    const char *names[2] = {"delta_tau_S", "delta_tau_L"};
    const AxisSpec *axes[2] = {&lattice.axis1, &lattice.axis2};
    const FrequencyAxis *bands[2] = {&band.axis1(), &band.axis2()};
    for (int k = 0; k < 2; k++) {
        double step = axes[k]->step;
        const auto &b = *bands[k];
        double top = std::max(std::abs(b.min), std::abs(b.max));
        if (demodulate) {
            if (!bandpass_ok(b.min, b.max, step)) {
                throw AliasingError(names[k], step, bandpass_step(b));
            }
        } else if (step > std::numbers::pi / top * (1 + 1e-12)) {
            throw AliasingError(names[k], step, std::numbers::pi / top);
        }
    }
}

JsiEstimate reconstruct_jsi(const Interferogram &interferogram, const FrequencyGrid &band,
                            const ReconstructOptions &options) {
    if (interferogram.rank() != 2 || interferogram.values.empty()) {
        throw DimensionError("reconstruction needs a non-empty 2D interferogram");
    }
    if (auto same = interferogram.meta("identical_sources"); same && *same != "true") {
        throw InvalidArgument("reconstruction needs an interferogram from identical sources");
    }
    Interferogram ifg = canonical_delay_axes(interferogram);
    DelayLattice lattice{ifg.axes[0].spec(), ifg.axes[1].spec()};
    auto symmetry = lattice.symmetry();
    check_sampling(lattice, band, options.demodulate);

    const auto &t1 = lattice.axis1;
    const auto &t2 = lattice.axis2;
    const std::size_t L1 = t1.count, L2 = t2.count;
    const std::size_t n1 = band.n1(), n2 = band.n2();
    const double edge1 = std::max(std::abs(t1.start), std::abs(t1.at(L1 - 1)));
    const double edge2 = std::max(std::abs(t2.start), std::abs(t2.at(L2 - 1)));

    // Weighted samples w * (1 - G).
    std::vector<double> r(L1 * L2);
    for (std::size_t i = 0; i < L1; i++) {
        double w1 = symmetry == DelayLattice::Symmetry::HalfPlane && !near_zero(t1.at(i), t1.step) ? 2.0 : 1.0;
        if (options.window == Window::Hann) {
            w1 *= hann(t1.at(i), edge1);
        }
        for (std::size_t j = 0; j < L2; j++) {
            double w = w1;
            if (options.window == Window::Hann) {
                w *= hann(t2.at(j), edge2);
            }
            r[i * L2 + j] = w * (1 - ifg.values[i * L2 + j]);
        }
    }

    // J(w1, w2) = 2 / (2 pi)^2 sum R cos(w1 t1 + w2 t2) h1 h2, split into two 1D passes.
    // With demodulation the carrier phase is factored out of the inner sums; the result is the same
    // sum, so both paths agree wherever both sampling conditions hold.
    const double c1 = options.demodulate ? 0.5 * (band.axis1().min + band.axis1().max) : 0.0;
    const double c2 = options.demodulate ? 0.5 * (band.axis2().min + band.axis2().max) : 0.0;
    std::vector<cdouble> partial(L1 * n2);
    for (std::size_t j = 0; j < n2; j++) {
        double w = band.axis2().node(j);
        std::vector<cdouble> e(L2);
        for (std::size_t b = 0; b < L2; b++) {
            double t = t2.at(b);
            e[b] = std::polar(1.0, c2 * t) * std::polar(1.0, (w - c2) * t);
        }
        for (std::size_t a = 0; a < L1; a++) {
            cdouble acc = 0;
            const double *row = &r[a * L2];
            for (std::size_t b = 0; b < L2; b++) {
                acc += row[b] * e[b];
            }
            partial[a * n2 + j] = acc;
        }
    }
    JsiEstimate est{JointSpectrum{band, std::vector<double>(n1 * n2)}, 0, options.window, 0, false};
    const double scale = 2 / (4 * std::numbers::pi * std::numbers::pi) * t1.step * t2.step;
    for (std::size_t i = 0; i < n1; i++) {
        double w = band.axis1().node(i);
        std::vector<cdouble> e(L1);
        for (std::size_t a = 0; a < L1; a++) {
            double t = t1.at(a);
            e[a] = std::polar(1.0, c1 * t) * std::polar(1.0, (w - c1) * t);
        }
        for (std::size_t j = 0; j < n2; j++) {
            cdouble acc = 0;
            for (std::size_t a = 0; a < L1; a++) {
                acc += e[a] * partial[a * n2 + j];
            }
            est.spectrum.at(i, j) = scale * acc.real();
        }
    }

    double total = 0, abs_total = 0, negative = 0;
    for (double v : est.spectrum.values) {
        total += v;
        abs_total += std::abs(v);
        negative += std::min(v, 0.0);
    }
    est.raw_integral = total * band.cell_area();
    // A transform this small relative to its own rounding carries no spectrum.
    double peak_sample = 0;
    for (double v : r) {
        peak_sample = std::max(peak_sample, std::abs(v));
    }
    if (!(est.raw_integral > 0) || peak_sample < 1e-12) {
        est.degenerate = true;
        std::fill(est.spectrum.values.begin(), est.spectrum.values.end(), 0.0);
        return est;
    }
    est.negative_fraction = negative < 0 ? -negative / abs_total : 0.0;
    for (double &v : est.spectrum.values) {
        v = std::max(v / est.raw_integral, 0.0);
    }
    return est;
}

double relative_l2(const JointSpectrum &estimate, const JointSpectrum &truth) {
    if (!(estimate.grid == truth.grid)) {
        throw DimensionError("estimate and truth live on different grids");
    }
    double num = 0, den = 0;
    for (std::size_t k = 0; k < truth.values.size(); k++) {
        double d = estimate.values[k] - truth.values[k];
        num += d * d;
        den += truth.values[k] * truth.values[k];
    }
    return std::sqrt(num / den);
}

double roundtrip_error(const BiphotonAmplitude &model, const std::optional<SpectralFilter> &filter1,
                       const std::optional<SpectralFilter> &filter2, const FrequencyGrid &grid,
                       const DelayLattice &lattice, const ReconstructOptions &options) {
    lattice.validate();
    check_sampling(lattice, grid, options.demodulate);
    auto phi = sample_on_grid(model, grid, filter1, filter2);
    auto scan = scan_2d(phi, phi, lattice.axis1, lattice.axis2);
    auto est = reconstruct_jsi(scan, grid, options);
    return relative_l2(est.spectrum, jsi(phi));
}

void write_jsi_csv(std::ostream &out, const JointSpectrum &spectrum, const std::vector<std::string> &extra_header) {
    const auto &g = spectrum.grid;
    out << "# omega1 axis " << g.n1() << ',' << format_double(g.axis1().min) << ',' << format_double(g.axis1().max)
        << '\n';
    out << "# omega2 axis " << g.n2() << ',' << format_double(g.axis2().min) << ',' << format_double(g.axis2().max)
        << '\n';
    for (const auto &line : extra_header) {
        out << "# " << line << '\n';
    }
    for (std::size_t i = 0; i < g.n1(); i++) {
        for (std::size_t j = 0; j < g.n2(); j++) {
            out << i << ',' << j << ',' << format_double(spectrum.at(i, j)) << '\n';
        }
    }
}

}  // namespace biphoton
