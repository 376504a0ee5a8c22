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

#include "biphoton/counting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t poisson_draw(double mean, std::mt19937_64 &rng) {
    if (mean <= 0) {
        return 0;
    }
    std::poisson_distribution<std::uint64_t> dist(mean);
    return dist(rng);
}

}  // namespace

void DetectorConfig::validate() const {
    if (!(quantum_efficiency > 0 && quantum_efficiency <= 1)) {
        throw InvalidArgument("quantum efficiency must lie in (0, 1]");
    }
    if (!(trigger_rate > 0)) {
        throw InvalidArgument("trigger rate must be positive");
    }
    if (!(coincidence_window > 0)) {
        throw InvalidArgument("coincidence window must be positive");
    }
}

void SourceBudget::validate() const {
    for (double v : {singles_rate_1, singles_rate_2, coupling_efficiency, coincidence_to_singles}) {
        if (!(v >= 0) || !std::isfinite(v)) {
            throw InvalidArgument("budget rates and efficiencies must be non-negative");
        }
    }
    if (!(pair_probability_per_pulse >= 0 && pair_probability_per_pulse <= 1)) {
        throw InvalidArgument("pair probability per pulse must lie in [0, 1]");
    }
    if (!(car > 0)) {
        throw InvalidArgument("coincidence-to-accidental ratio must be positive");
    }
    if (accidental_rate && !(*accidental_rate >= 0)) {
        throw InvalidArgument("accidental rate must be non-negative");
    }
}

double SourceBudget::coincidence_rate() const {
    return coincidence_to_singles * std::sqrt(singles_rate_1 * singles_rate_2);
}

double SourceBudget::accidental_rate_for(const DetectorConfig &det) const {
    if (accidental_rate) {
        return *accidental_rate;
    }
    return accidentals(singles_rate_1, singles_rate_2, det.trigger_rate);
}

double accidentals(double n1, double n3, double f_trig) {
    if (f_trig == 0) {
        throw DivisionError("trigger rate is zero");
    }
    if (n1 < 0 || n3 < 0 || f_trig < 0) {
        throw InvalidArgument("rates must be non-negative");
    }
    return n1 * n3 / f_trig;
}

double pair_probability_from_car(double car) {
    if (car == 0) {
        throw DivisionError("coincidence-to-accidental ratio is zero");
    }
    if (car < 0) {
        throw InvalidArgument("coincidence-to-accidental ratio must be positive");
    }
    return 1 / car;
}

std::vector<std::uint64_t> synth_counts(double mean_rate, double bin_duration, std::size_t trials,
                                        std::uint64_t seed) {
    if (!(mean_rate >= 0) || !(bin_duration >= 0) || trials < 1) {
        throw InvalidArgument("synth_counts needs mean_rate >= 0 and at least one trial");
    }
    std::mt19937_64 rng(seed);
    std::vector<std::uint64_t> out(trials);
    double mean = mean_rate * bin_duration;
    for (auto &v : out) {
        v = poisson_draw(mean, rng);
    }
    return out;
}

std::vector<double> subtract_accidentals(std::span<const double> raw, double accidental_rate, double bin_duration) {
    if (!(bin_duration > 0)) {
        throw InvalidArgument("bin duration must be positive");
    }
    double acc = accidental_rate * bin_duration;
    std::vector<double> out(raw.size());
    std::transform(raw.begin(), raw.end(), out.begin(), [acc](double r) { return r - acc; });
    return out;
}

double JitterModel::Contribution::rms() const {
    return kind == Kind::Rms ? spread : fwhm_to_sigma(spread);
}

JitterModel::JitterModel(std::vector<Contribution> contributions) {
    for (auto &c : contributions) {
        add(std::move(c.label), c.spread, c.kind);
    }
}

JitterModel &JitterModel::add(std::string label, double spread, Kind kind) {
    if (!(spread >= 0) || !std::isfinite(spread)) {
        throw InvalidArgument("jitter contribution " + label + " must be non-negative");
    }
    contributions_.push_back(Contribution{std::move(label), spread, kind});
    return *this;
}

double JitterModel::combined_rms() const {
    double sq = 0;
    for (const auto &c : contributions_) {
        sq += c.rms() * c.rms();
    }
    return std::sqrt(sq);
}

double JitterModel::combined_fwhm() const { return sigma_to_fwhm(combined_rms()); }

DelayProfile independent_hom_dip(const DelayProfile &ideal_visibility, const JitterModel &jitter, double v_cap) {
    if (!(ideal_visibility.step > 0) || ideal_visibility.values.empty()) {
        throw InvalidArgument("visibility profile needs a positive step and at least one sample");
    }
    if (!(v_cap >= 0 && v_cap <= 1)) {
        throw InvalidArgument("visibility cap must lie in [0, 1]");
    }
    for (double v : ideal_visibility.values) {
        if (!(v >= 0 && v <= 1)) {
            throw InvalidArgument("ideal visibility profile must lie in [0, 1]");
        }
    }
    const auto &in = ideal_visibility.values;
    const std::size_t n = in.size();
    DelayProfile out{ideal_visibility.start, ideal_visibility.step, std::vector<double>(n)};

    double s = jitter.combined_rms() / ideal_visibility.step;
    if (s < 1e-3) {
        for (std::size_t k = 0; k < n; k++) {
            out.values[k] = v_cap * in[k];
        }
        return out;
    }
    auto half = static_cast<std::ptrdiff_t>(std::ceil(8 * s));
    std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
    double total = 0;
    for (std::ptrdiff_t m = -half; m <= half; m++) {
        double w = std::exp(-0.5 * static_cast<double>(m * m) / (s * s));
        kernel[static_cast<std::size_t>(m + half)] = w;
        total += w;
    }
    for (auto &w : kernel) {
        w /= total;
    }
    // Zero padding beyond the profile.
    for (std::size_t k = 0; k < n; k++) {
        double acc = 0;
        for (std::ptrdiff_t m = -half; m <= half; m++) {
            auto src = static_cast<std::ptrdiff_t>(k) - m;
            if (src < 0 || src >= static_cast<std::ptrdiff_t>(n)) {
                continue;
            }
            acc += kernel[static_cast<std::size_t>(m + half)] * in[static_cast<std::size_t>(src)];
        }
        out.values[k] = v_cap * std::min(acc, 1.0);
    }
    return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Interferogram rate_to_counts(const Interferogram &normalized, const SourceBudget &budget, const DetectorConfig &det,
                             double bin_duration, std::uint64_t seed) {
    normalized.validate();
    budget.validate();
    det.validate();
    if (!(bin_duration > 0)) {
        throw InvalidArgument("bin duration must be positive");
    }
    double baseline = budget.coincidence_rate() * bin_duration;
    double acc = budget.accidental_rate_for(det) * bin_duration;

    Interferogram out = normalized;
    out.counts = std::vector<double>(normalized.values.size());
    for (std::size_t k = 0; k < normalized.values.size(); k++) {
        std::mt19937_64 rng(mix_seed(seed, k));
        double mean = baseline * normalized.values[k] + acc;
        (*out.counts)[k] = static_cast<double>(poisson_draw(mean, rng));
    }
    out.seed = seed;
    out.set_meta("baseline_counts", format_double(baseline));
    out.set_meta("accidental_counts", format_double(acc));
    out.set_meta("bin_duration_s", format_double(bin_duration));
    return out;
}

}  // namespace biphoton
