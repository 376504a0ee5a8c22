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

#ifndef BIPHOTON_COUNTING_HPP
#define BIPHOTON_COUNTING_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "biphoton/interferometer.hpp"

namespace biphoton {

struct DetectorConfig {
    double quantum_efficiency = 0.15;
    double trigger_rate = 4e6;
    double coincidence_window = 10e-9;

    void validate() const;
};

/// Singles rates already include detection efficiency.
struct SourceBudget {
    double singles_rate_1 = 0;
    double singles_rate_2 = 0;
    double pair_probability_per_pulse = 0;
    double coupling_efficiency = 0;
    double coincidence_to_singles = 0;
    double car = 1;
    /// Replaces singles_1 * singles_2 / f_trig when set; 0 disables accidentals.
    std::optional<double> accidental_rate;

    void validate() const;
    /// Coincidences per second at the incoherent level G = 1.
    double coincidence_rate() const;
    double accidental_rate_for(const DetectorConfig &det) const;
};

/// N1 N3 / f_trig.
double accidentals(double n1, double n3, double f_trig);

/// 1 / CAR.
double pair_probability_from_car(double car);

/// Independent Poisson samples with mean mean_rate * bin_duration.
std::vector<std::uint64_t> synth_counts(double mean_rate, double bin_duration, std::size_t trials,
                                        std::uint64_t seed);

/// raw - accidental_rate * bin_duration, never clipped.
std::vector<double> subtract_accidentals(std::span<const double> raw, double accidental_rate, double bin_duration);

/// Quadrature-combined timing spreads.
class JitterModel {
   public:
    enum class Kind { Rms, Fwhm };

    struct Contribution {
        std::string label;
        double spread = 0;
        Kind kind = Kind::Fwhm;

        double rms() const;
    };

    JitterModel() = default;
    explicit JitterModel(std::vector<Contribution> contributions);

    JitterModel &add(std::string label, double spread, Kind kind = Kind::Fwhm);
    const std::vector<Contribution> &contributions() const { return contributions_; }
    double combined_rms() const;
    double combined_fwhm() const;

   private:
    std::vector<Contribution> contributions_;
};

/// Visibility profile on a uniform delay lattice.
struct DelayProfile {
    double start = 0;
    double step = 0;
    std::vector<double> values;

    double at(std::size_t k) const { return start + static_cast<double>(k) * step; }
};

/// Ideal visibility profile convolved with the Gaussian jitter kernel and scaled by v_cap.
DelayProfile independent_hom_dip(const DelayProfile &ideal_visibility, const JitterModel &jitter,
                                 double v_cap = 1.0 / 3.0);

/// SplitMix64 finalizer; used to derive per-point seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

/// Expected counts baseline * G + accidentals * bin, with Poisson noise per lattice point.
/// The result keeps G in `values` and stores the noisy counts alongside.
Interferogram rate_to_counts(const Interferogram &normalized, const SourceBudget &budget, const DetectorConfig &det,
                             double bin_duration, std::uint64_t seed);

}  // namespace biphoton

#endif
