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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

namespace {

void require_same_grid(const SampledAmplitude &a, const SampledAmplitude &b) {
    if (!(a.grid == b.grid) || a.values.size() != b.values.size()) {
        throw DimensionError("both amplitudes must be sampled on the same frequency grid");
    }
}

std::vector<cdouble> overlap_product(const SampledAmplitude &a, const SampledAmplitude &b) {
    std::vector<cdouble> p(a.values.size());
    for (std::size_t k = 0; k < p.size(); k++) {
        p[k] = a.values[k] * std::conj(b.values[k]);
    }
    return p;
}

std::vector<cdouble> phase_row(const FrequencyAxis &axis, double tau) {
    std::vector<cdouble> row(axis.count);
    for (std::size_t i = 0; i < axis.count; i++) {
        row[i] = std::polar(1.0, -axis.node(i) * tau);
    }
    return row;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool identical_sources(const SampledAmplitude &a, const SampledAmplitude &b) {
    return a.grid == b.grid && a.values == b.values;
}

}  // namespace

DelayConfig DelayConfig::from_path_differences(double dx1, double dx2) {
    return DelayConfig{0, -length_to_delay(dx1), 0, length_to_delay(dx2)};
}

AxisSpec path_axis_to_delay(DelayAxis axis, const AxisSpec &path_axis) {
    double sign = axis == DelayAxis::S ? 1.0 : -1.0;
    return AxisSpec{sign * length_to_delay(path_axis.start), sign * length_to_delay(path_axis.step), path_axis.count};
}

std::optional<std::string> Interferogram::meta(const std::string &key) const {
    for (const auto &[k, v] : metadata) {
        if (k == key) {
            return v;
        }
    }
    return std::nullopt;
}

void Interferogram::set_meta(const std::string &key, const std::string &value) {
    for (auto &[k, v] : metadata) {
        if (k == key) {
            v = value;
            return;
        }
    }
    metadata.emplace_back(key, value);
}

void Interferogram::validate() const {
    if (axes.empty() || axes.size() > 2) {
        throw DimensionError("interferogram must have one or two axes");
    }
    std::size_t expected = 1;
    for (const auto &a : axes) {
        if (a.count == 0 || !(a.step != 0) || !std::isfinite(a.step)) {
            throw DimensionError("interferogram axis " + a.name + " is not strictly monotone");
        }
        expected *= a.count;
    }
    if (values.size() != expected) {
        throw DimensionError("interferogram value count does not match its axes");
    }
    if (counts && counts->size() != expected) {
        throw DimensionError("interferogram count column does not match its axes");
    }
    for (double v : values) {
        if (!(v >= 0 && v <= 2)) {
            throw InvalidArgument("interferogram value outside [0, 2]");
        }
    }
}

Interferogram with_path_axes(Interferogram ifg) {
    for (auto &a : ifg.axes) {
        if (a.name == "delta_tau_S") {
            a = InterferogramAxis{"delta_x1", delay_to_length(a.start), delay_to_length(a.step), a.count};
        } else if (a.name == "delta_tau_L") {
            a = InterferogramAxis{"delta_x2", -delay_to_length(a.start), -delay_to_length(a.step), a.count};
        }
    }
    return ifg;
}

cdouble gamma(const SampledAmplitude &phiA, const SampledAmplitude &phiB, double delta_tau_S, double delta_tau_L) {
    require_same_grid(phiA, phiB);
    const auto &g = phiA.grid;
    cdouble total = 0;
    for (std::size_t i = 0; i < g.n1(); i++) {
        double w1 = g.axis1().node(i);
        for (std::size_t j = 0; j < g.n2(); j++) {
            cdouble p = phiA.at(i, j) * std::conj(phiB.at(i, j));
            if (p == cdouble(0)) {
                continue;
            }
            total += p * std::polar(1.0, -(w1 * delta_tau_S + g.axis2().node(j) * delta_tau_L));
        }
    }
    return total * g.cell_area();
}

std::vector<cdouble> gamma_lattice(const SampledAmplitude &phiA, const SampledAmplitude &phiB, const AxisSpec &s_axis,
                                   const AxisSpec &l_axis) {
    require_same_grid(phiA, phiB);
    const auto &g = phiA.grid;
    const std::size_t n1 = g.n1(), n2 = g.n2();
    std::vector<cdouble> p = overlap_product(phiA, phiB);

    // partial[s][j] = sum_i p(i, j) exp(-i w1_i tau_S[s])
    std::vector<cdouble> partial(s_axis.count * n2);
    for (std::size_t s = 0; s < s_axis.count; s++) {
        auto row = phase_row(g.axis1(), s_axis.at(s));
        cdouble *dst = &partial[s * n2];
        for (std::size_t i = 0; i < n1; i++) {
            const cdouble *src = &p[i * n2];
            for (std::size_t j = 0; j < n2; j++) {
                dst[j] += src[j] * row[i];
            }
        }
    }

    std::vector<cdouble> out(s_axis.count * l_axis.count);
    const double area = g.cell_area();
    for (std::size_t l = 0; l < l_axis.count; l++) {
        auto row = phase_row(g.axis2(), l_axis.at(l));
        for (std::size_t s = 0; s < s_axis.count; s++) {
            const cdouble *src = &partial[s * n2];
            cdouble acc = 0;
            for (std::size_t j = 0; j < n2; j++) {
                acc += src[j] * row[j];
            }
            out[s * l_axis.count + l] = acc * area;
        }
    }
    return out;
}

double coincidence_rate(const SampledAmplitude &phiA, const SampledAmplitude &phiB, double delta_tau_S,
                        double delta_tau_L) {
    return std::clamp(1 - gamma(phiA, phiB, delta_tau_S, delta_tau_L).real(), 0.0, 2.0);
}

double sinc(double u) {
    if (std::abs(u) < 1e-4) {
        double u2 = u * u;
        return 1 - u2 / 6 + u2 * u2 / 120;
    }
    return std::sin(u) / u;
}

double hom_fringe_analytic(double visibility, double sigma_x, double wavelength, double delta_x2) {
    if (visibility < 0 || visibility > 1 || !(sigma_x > 0) || !(wavelength > 0)) {
        throw InvalidArgument("fringe model needs 0 <= V <= 1 and positive widths");
    }
    return 0.5 * (1 - visibility * sinc(delta_x2 / sigma_x) *
                          std::cos(2 * std::numbers::pi * delta_x2 / wavelength));
}

Envelope gaussian_envelope(double fwhm) {
    double sigma = fwhm_to_sigma(fwhm);
    return [sigma](double t) { return std::exp(-t * t / (2 * sigma * sigma)); };
}

Envelope sinc_envelope(double width) {
    return [width](double t) { return sinc(t / width); };
}

double hom_generalized(double visibility, const Envelope &envelope, double delta_omega, double delta_t,
                       double theta) {
    if (visibility < 0 || visibility > 1) {
        throw InvalidArgument("visibility must lie in [0, 1]");
    }
    return 0.5 * (1 - visibility * envelope(delta_t) * std::cos(delta_omega * delta_t) * std::cos(theta));
}

Interferogram scan_1d(const SampledAmplitude &phiA, const SampledAmplitude &phiB, DelayAxis axis,
                      double fixed_other_delay, double start, double step, std::size_t count) {
    if (count < 2) {
        throw InvalidArgument("a scan needs at least two points");
    }
    AxisSpec scanned{start, step, count};
    AxisSpec fixed{fixed_other_delay, 1, 1};
    std::vector<cdouble> g;
    if (axis == DelayAxis::L) {
        g = gamma_lattice(phiA, phiB, fixed, scanned);
    } else {
        // Swap roles so the scanned axis is the fast one.
        SampledAmplitude a{FrequencyGrid(phiA.grid.axis2(), phiA.grid.axis1()), {}};
        SampledAmplitude b{a.grid, {}};
        a.values.resize(phiA.values.size());
        b.values.resize(phiB.values.size());
        for (std::size_t i = 0; i < phiA.grid.n1(); i++) {
            for (std::size_t j = 0; j < phiA.grid.n2(); j++) {
                a.at(j, i) = phiA.at(i, j);
                b.at(j, i) = phiB.values[phiB.grid.index(i, j)];
            }
        }
        g = gamma_lattice(a, b, fixed, scanned);
    }
    Interferogram out;
    out.axes.push_back(InterferogramAxis{axis == DelayAxis::S ? "delta_tau_S" : "delta_tau_L", start, step, count});
    out.values.resize(count);
    for (std::size_t k = 0; k < count; k++) {
        out.values[k] = std::clamp(1 - g[k].real(), 0.0, 2.0);
    }
    out.set_meta("fixed_axis", axis == DelayAxis::S ? "delta_tau_L" : "delta_tau_S");
    out.set_meta("fixed_delay_s", format_double(fixed_other_delay));
    out.set_meta("identical_sources", identical_sources(phiA, phiB) ? "true" : "false");
    return out;
}

Interferogram scan_2d(const SampledAmplitude &phiA, const SampledAmplitude &phiB, const AxisSpec &s_axis,
                      const AxisSpec &l_axis) {
    if (s_axis.count < 2 || l_axis.count < 2) {
        throw InvalidArgument("a 2D scan needs at least two points per axis");
    }
    auto g = gamma_lattice(phiA, phiB, s_axis, l_axis);
    Interferogram out;
    out.axes.push_back(InterferogramAxis{"delta_tau_S", s_axis.start, s_axis.step, s_axis.count});
    out.axes.push_back(InterferogramAxis{"delta_tau_L", l_axis.start, l_axis.step, l_axis.count});
    out.values.resize(g.size());
    for (std::size_t k = 0; k < g.size(); k++) {
        out.values[k] = std::clamp(1 - g[k].real(), 0.0, 2.0);
    }
    out.set_meta("identical_sources", identical_sources(phiA, phiB) ? "true" : "false");
    return out;
}

cdouble symmetrized_gamma(const SampledAmplitude &phi, double tau1, double tau2) {
    const auto &g = phi.grid;
    if (!(g.axis1() == g.axis2())) {
        throw DimensionError("symmetrized overlap needs identical omega1 and omega2 axes");
    }
    cdouble total = 0;
    for (std::size_t i = 0; i < g.n1(); i++) {
        double w1 = g.axis1().node(i);
        for (std::size_t j = 0; j < g.n2(); j++) {
            cdouble p = phi.at(i, j) * std::conj(phi.at(j, i));
            if (p == cdouble(0)) {
                continue;
            }
            total += p * std::polar(1.0, -(w1 * tau1 + g.axis2().node(j) * tau2));
        }
    }
    return total * g.cell_area();
}

void write_interferogram_csv(std::ostream &out, const Interferogram &ifg, const std::vector<std::string> &extra_header) {
    for (std::size_t a = 0; a < ifg.axes.size(); a++) {
        const auto &ax = ifg.axes[a];
        out << "# axis" << a + 1 << ' ' << ax.name << ',' << format_double(ax.start) << ',' << format_double(ax.step)
            << ',' << ax.count << '\n';
    }
    if (ifg.seed) {
        out << "# seed=" << *ifg.seed << '\n';
    }
    for (const auto &[k, v] : ifg.metadata) {
        out << "# " << k << '=' << v << '\n';
    }
    for (const auto &line : extra_header) {
        out << "# " << line << '\n';
    }
    out << "# columns ";
    for (const auto &ax : ifg.axes) {
        out << ax.name << ',';
    }
    out << "G" << (ifg.counts ? ",counts" : "") << '\n';

    const std::size_t inner = ifg.axes.size() == 2 ? ifg.axes[1].count : ifg.values.size();
    for (std::size_t k = 0; k < ifg.values.size(); k++) {
        if (ifg.axes.size() == 2) {
            out << format_double(ifg.axes[0].at(k / inner)) << ',' << format_double(ifg.axes[1].at(k % inner));
        } else {
            out << format_double(ifg.axes[0].at(k));
        }
        out << ',' << format_double(ifg.values[k]);
        if (ifg.counts) {
            out << ',' << format_double((*ifg.counts)[k]);
        }
        out << '\n';
    }
}

Interferogram read_interferogram_csv(std::istream &in) {
    Interferogram ifg;
    bool has_counts = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            std::string body = line.substr(1);
            body.erase(0, body.find_first_not_of(' '));
            if (body.rfind("axis", 0) == 0) {
                auto space = body.find(' ');
                if (space == std::string::npos) {
                    throw InvalidArgument("interferogram csv line " + std::to_string(line_no) + ": bad axis header");
                }
                std::stringstream fields(body.substr(space + 1));
                InterferogramAxis ax;
                std::string start, step, count;
                if (!std::getline(fields, ax.name, ',') || !std::getline(fields, start, ',') ||
                    !std::getline(fields, step, ',') || !std::getline(fields, count, ',')) {
                    throw InvalidArgument("interferogram csv line " + std::to_string(line_no) + ": bad axis header");
                }
                ax.start = std::stod(start);
                ax.step = std::stod(step);
                ax.count = std::stoul(count);
                ifg.axes.push_back(ax);
            } else if (body.rfind("seed=", 0) == 0) {
                ifg.seed = std::stoull(body.substr(5));
            } else if (body.rfind("columns ", 0) == 0) {
                has_counts = body.find(",counts") != std::string::npos;
            } else if (auto eq = body.find('='); eq != std::string::npos) {
                ifg.metadata.emplace_back(body.substr(0, eq), body.substr(eq + 1));
            }
            continue;
        }
        std::vector<double> fields;
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) {
            try {
                fields.push_back(std::stod(cell));
            } catch (const std::exception &) {
                throw InvalidArgument("interferogram csv line " + std::to_string(line_no) + ": not a number");
            }
        }
        std::size_t expected = ifg.axes.size() + 1 + (has_counts ? 1 : 0);
        if (ifg.axes.empty() || fields.size() != expected) {
            throw InvalidArgument("interferogram csv line " + std::to_string(line_no) + ": wrong column count");
        }
        ifg.values.push_back(fields[ifg.axes.size()]);
        if (has_counts) {
            if (!ifg.counts) {
                ifg.counts.emplace();
            }
            ifg.counts->push_back(fields.back());
        }
    }
    ifg.validate();
    return ifg;
}

}  // namespace biphoton
