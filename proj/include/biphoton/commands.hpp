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

#ifndef BIPHOTON_COMMANDS_HPP
#define BIPHOTON_COMMANDS_HPP

#include <filesystem>
#include <optional>
#include <string>

#include "biphoton/config.hpp"
#include "biphoton/fitting.hpp"
#include "biphoton/reconstruct.hpp"

namespace biphoton {

// Every command writes resolved_config.ini next to its outputs, and every output file carries
// the resolved configuration hash in its header. Noise follows run.seed unless run.noiseless.

struct FringeOutcome {
    FringeFit wide;
    /// Fine scan around the centre with sigma_x and x0 held at the wide-scan values.
    FringeFit fine;
};

/// fringe.csv, fringe_fine.csv, fit_report.txt. Throws FitError after writing the report.
FringeOutcome cmd_fringe(const RunConfig &config, const std::filesystem::path &out_dir);

struct DipOutcome {
    DipFit fit;
    /// Combined timing jitter FWHM as a path length.
    double jitter_fwhm = 0;
};

/// dip.csv, fit_report.txt.
DipOutcome cmd_hom_dip(const RunConfig &config, const std::filesystem::path &out_dir);

struct Scan2dOutcome {
    VisibilityEnvelope envelope;
    double diagonal_correlation = 0;
    /// "separable" below 0.1, "entangled" above 0.5, otherwise "indeterminate".
    std::string signature;
};

/// scan2d.csv, envelope_report.txt. Path axes in metres.
Scan2dOutcome cmd_scan2d(const RunConfig &config, const std::filesystem::path &out_dir);

struct ReconstructOutcome {
    JsiEstimate estimate;
    DelayLattice lattice;
    /// Only when the interferogram was synthesized from the configured source.
    std::optional<double> roundtrip_error;
    std::optional<double> true_correlation;
    double correlation = 0;
};

/// jsi.csv, recon_report.txt (and recon_interferogram.csv when synthesizing).
ReconstructOutcome cmd_reconstruct(const RunConfig &config, const std::filesystem::path &out_dir);

struct BudgetOutcome {
    double accidental_rate = 0;
    double pair_probability = 0;
    double coincidence_rate = 0;
    std::string text;
};

/// Pure arithmetic; also writes budget_report.txt.
BudgetOutcome cmd_budget(const RunConfig &config, const std::filesystem::path &out_dir);

/// Odd-count axis from -span to +span.
AxisSpec centered_axis(double span, double step);

}  // namespace biphoton

#endif
