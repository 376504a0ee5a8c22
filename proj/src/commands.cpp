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

#include "biphoton/commands.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "biphoton/counting.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

namespace fs = std::filesystem;

namespace {

std::string fmt(const char *format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

std::ofstream open_output(const fs::path &dir, const std::string &name) {
    fs::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + (dir / name).string());
    }
    return out;
}

void echo_config(const RunConfig &cfg, const fs::path &dir) {
    auto out = open_output(dir, "resolved_config.ini");
    out << "# config_hash=" << cfg.hash_hex() << "\n" << cfg.resolved();
}

std::string report_header(const RunConfig &cfg, const std::string &title) {
    std::string s = "# " + title + "\n# config_hash=" + cfg.hash_hex() + "\n";
    s += "# seed=" + std::to_string(cfg.count("run.seed")) + " noiseless=" + cfg.text("run.noiseless") + "\n";
    return s;
}

SampledAmplitude source_amplitude(const RunConfig &cfg, std::size_t n) {
    return sample_on_grid(cfg.amplitude(), cfg.grid(n), cfg.filter(Arm::One), cfg.filter(Arm::Two));
}

// Counts for every lattice point plus their accidental-subtracted version.
struct Measured {
    Interferogram data;
    std::vector<double> net;
    double baseline = 0;
};

Measured measure(const RunConfig &cfg, const Interferogram &ideal, std::uint64_t stream) {
    Measured m;
    if (cfg.flag("run.noiseless")) {
        m.data = ideal;
        m.net = ideal.values;
        m.baseline = 1;
        return m;
    }
    auto budget = cfg.budget();
    auto det = cfg.detector();
    double bin = cfg.number("budget.bin");
    m.data = rate_to_counts(ideal, budget, det, bin, mix_seed(cfg.count("run.seed"), stream));
    m.net = subtract_accidentals(*m.data.counts, budget.accidental_rate_for(det), bin);
    m.baseline = budget.coincidence_rate() * bin;
    return m;
}

// Net counts rescaled to the coincidence probability G and clamped to its range.
Interferogram normalized_measurement(const Measured &m) {
    Interferogram g = m.data;
    for (std::size_t k = 0; k < g.values.size(); k++) {
        g.values[k] = std::clamp(m.net[k] / m.baseline, 0.0, 2.0);
    }
    g.counts.reset();
    return g;
}

std::vector<double> coordinates(const InterferogramAxis &a) {
    std::vector<double> x(a.count);
    for (std::size_t k = 0; k < a.count; k++) {
        x[k] = a.at(k);
    }
    return x;
}

std::string fringe_block(const FringeFit &f) {
    std::string s;
    s += fmt("amplitude = %.9g +- %.3g\n", f.amplitude, f.amplitude_err);
    s += fmt("visibility = %.6f +- %.6f\n", f.visibility, f.visibility_err);
    s += fmt("sigma_x_mm = %.9g +- %.3g\n", f.sigma_x * 1e3, f.sigma_x_err * 1e3);
    s += fmt("pi_sigma_x_mm = %.6f\n", std::numbers::pi * f.sigma_x * 1e3);
    s += fmt("period_nm = %.6f +- %.3g\n", f.wavelength * 1e9, f.wavelength_err * 1e9);
    s += fmt("phase_rad = %.6f +- %.3g\n", f.phase, f.phase_err);
    s += fmt("center_um = %.6f +- %.3g\n", f.center * 1e6, f.center_err * 1e6);
    s += fmt("residual_rms = %.6g\n", f.residual_rms);
    s += fmt("iterations = %zu\n", f.iterations);
    return s;
}

void write_csv(const RunConfig &cfg, const fs::path &dir, const std::string &name, Interferogram ifg) {
    ifg.set_meta("config_hash", cfg.hash_hex());
    auto out = open_output(dir, name);
    write_interferogram_csv(out, ifg);
}

double smallest_coherence_time(const JointSpectrum &js) {
    auto m = spectral_moments(js);
    double a = m.std1 * m.std1, b = m.std2 * m.std2, c = m.correlation * m.std1 * m.std2;
    double lmin = 0.5 * (a + b) - std::sqrt(0.25 * (a - b) * (a - b) + c * c);
    return 1 / std::sqrt(lmin);
}

}  // namespace

AxisSpec centered_axis(double span, double step) {
    if (!(step > 0) || !(span >= 0)) {
        throw InvalidArgument("scan span and step must be positive");
    }
    auto n = static_cast<std::size_t>(std::floor(span / step + 1e-9));
    return AxisSpec{-static_cast<double>(n) * step, step, 2 * n + 1};
}

FringeOutcome cmd_fringe(const RunConfig &cfg, const fs::path &out_dir) {
    echo_config(cfg, out_dir);
    auto phi = source_amplitude(cfg, cfg.count("source.grid_points"));
    double tau_s = length_to_delay(cfg.number("fringe.delta_x1"));
    auto scan = [&](const AxisSpec &path) {
        auto d = path_axis_to_delay(DelayAxis::L, path);
        return with_path_axes(scan_1d(phi, phi, DelayAxis::L, tau_s, d.start, d.step, d.count));
    };
    auto wide = measure(cfg, scan(centered_axis(cfg.number("fringe.wide_span"), cfg.number("fringe.wide_step"))), 1);
    auto fine = measure(cfg, scan(centered_axis(cfg.number("fringe.fine_span"), cfg.number("fringe.fine_step"))), 2);
    write_csv(cfg, out_dir, "fringe.csv", wide.data);
    write_csv(cfg, out_dir, "fringe_fine.csv", fine.data);

    std::string report = report_header(cfg, "phase-sensitive fringe along delta_x2");
    report += fmt("delta_x1_mm = %.6f\n", cfg.number("fringe.delta_x1") * 1e3);
    report += fmt("fit_data = %s\n", cfg.flag("run.noiseless") ? "G" : "accidental-subtracted counts");
    FringeOutcome outcome;
    try {
        auto xw = coordinates(wide.data.axes[0]);
        outcome.wide = fit_fringe(xw, wide.net);
        report += "\n[wide]\n" + fmt("points = %zu\n", xw.size()) + fringe_block(outcome.wide);

        FringeFitOptions fo;
        fo.period_guess = outcome.wide.wavelength;
        fo.sigma_guess = outcome.wide.sigma_x;
        fo.fix_sigma = true;
        fo.center_guess = outcome.wide.center;
        fo.fix_center = true;
        auto xf = coordinates(fine.data.axes[0]);
        outcome.fine = fit_fringe(xf, fine.net, fo);
        report += "\n[fine]\n" + fmt("points = %zu\n", xf.size()) + fringe_block(outcome.fine);
        report += "\nstatus = converged\n";
    } catch (const FitError &e) {
        report += std::string("\nstatus = failed: ") + e.what() + "\n";
        open_output(out_dir, "fit_report.txt") << report;
        throw;
    }
    open_output(out_dir, "fit_report.txt") << report;
    return outcome;
}

DipOutcome cmd_hom_dip(const RunConfig &cfg, const fs::path &out_dir) {
    echo_config(cfg, out_dir);
    auto phi = source_amplitude(cfg, cfg.count("source.grid_points"));
    auto spectrum = marginal_spectrum(jsi(phi), Arm::Two);
    const auto &ax = phi.grid.axis2();

    // Ideal same-spectrum dip: |FT of the normalized single-photon spectrum|^2.
    AxisSpec path = centered_axis(cfg.number("dip.span"), cfg.number("dip.step"));
    DelayProfile ideal{length_to_delay(path.start), length_to_delay(path.step), std::vector<double>(path.count)};
    double total = 0;
    for (double s : spectrum) {
        total += s;
    }
    for (std::size_t k = 0; k < path.count; k++) {
        std::complex<double> acc = 0;
        for (std::size_t j = 0; j < spectrum.size(); j++) {
            acc += spectrum[j] * std::polar(1.0, -ax.node(j) * ideal.at(k));
        }
        ideal.values[k] = std::min(std::norm(acc / total), 1.0);
    }
    auto jitter = cfg.jitter();
    auto dip = independent_hom_dip(ideal, jitter, cfg.number("jitter.v_cap"));

    Interferogram g;
    g.axes.push_back(InterferogramAxis{"delta_x", path.start, path.step, path.count});
    for (double v : dip.values) {
        g.values.push_back(1 - v);
    }
    auto m = measure(cfg, g, 3);
    write_csv(cfg, out_dir, "dip.csv", m.data);

    DipOutcome outcome;
    outcome.jitter_fwhm = delay_to_length(jitter.combined_fwhm());
    std::string report = report_header(cfg, "independent-photon HOM dip");
    report += fmt("jitter_fwhm_ps = %.6f\njitter_fwhm_mm = %.6f\nv_cap = %.6f\n", jitter.combined_fwhm() * 1e12,
                  outcome.jitter_fwhm * 1e3, cfg.number("jitter.v_cap"));
    try {
        // Keep whichever profile describes the data better.
        auto x = coordinates(g.axes[0]);
        auto gauss = fit_dip(x, m.net, {}, DipShape::Gaussian);
        auto sinc2 = fit_dip(x, m.net, {}, DipShape::SincSquared);
        outcome.fit = sinc2.residual_rms < gauss.residual_rms ? sinc2 : gauss;
        report += fmt("residual_rms_gaussian = %.6g\nresidual_rms_sinc2 = %.6g\n", gauss.residual_rms,
                      sinc2.residual_rms);
    } catch (const FitError &e) {
        report += std::string("status = failed: ") + e.what() + "\n";
        open_output(out_dir, "fit_report.txt") << report;
        throw;
    }
    const auto &f = outcome.fit;
    report += fmt("shape = %s\n", f.shape == DipShape::Gaussian ? "gaussian" : "sinc2");
    report += fmt("visibility = %.6f +- %.6f\n", f.visibility, f.visibility_err);
    report += fmt("visibility_percent = %.3f\n", 100 * f.visibility);
    report += fmt("fwhm_mm = %.6f +- %.6f\n", f.fwhm * 1e3, f.fwhm_err * 1e3);
    report += fmt("center_um = %.6f +- %.3g\n", f.center * 1e6, f.center_err * 1e6);
    report += fmt("amplitude = %.9g\nresidual_rms = %.6g\nstatus = converged\n", f.amplitude, f.residual_rms);
    open_output(out_dir, "fit_report.txt") << report;
    return outcome;
}

Scan2dOutcome cmd_scan2d(const RunConfig &cfg, const fs::path &out_dir) {
    echo_config(cfg, out_dir);
    auto phi = source_amplitude(cfg, cfg.count("source.grid_points"));
    auto x1 = centered_axis(cfg.number("scan2d.x1_span"), cfg.number("scan2d.x1_step"));
    auto x2 = centered_axis(cfg.number("scan2d.x2_span"), cfg.number("scan2d.x2_step"));
    auto ideal = with_path_axes(
        scan_2d(phi, phi, path_axis_to_delay(DelayAxis::S, x1), path_axis_to_delay(DelayAxis::L, x2)));
    auto m = measure(cfg, ideal, 4);
    write_csv(cfg, out_dir, "scan2d.csv", m.data);
    auto g = normalized_measurement(m);

    Scan2dOutcome outcome;
    std::string report = report_header(cfg, "visibility envelope along delta_x1");
    outcome.diagonal_correlation = diagonal_correlation(g);
    double r = std::abs(outcome.diagonal_correlation);
    outcome.signature = r < 0.1 ? "separable" : r > 0.5 ? "entangled" : "indeterminate";
    try {
        outcome.envelope = visibility_envelope(g, DelayAxis::L);
    } catch (const FitError &e) {
        report += std::string("status = failed: ") + e.what() + "\n";
        open_output(out_dir, "envelope_report.txt") << report;
        throw;
    }
    const auto &e = outcome.envelope.fit;
    report += fmt("envelope_fwhm_mm = %.6f +- %.6f\n", e.fwhm * 1e3, e.fwhm_err * 1e3);
    report += fmt("envelope_peak = %.6f +- %.6f\n", e.peak_visibility, e.peak_visibility_err);
    report += fmt("envelope_center_mm = %.6f +- %.3g\n", e.center * 1e3, e.center_err * 1e3);
    report += fmt("diagonal_correlation = %.6f\nsignature = %s\n", outcome.diagonal_correlation,
                  outcome.signature.c_str());
    report += "\n# delta_x1_mm,ok,visibility,visibility_err,fringe_center_um[,error]\n";
    for (const auto &s : outcome.envelope.slices) {
        report += fmt("%.6f,%d,%.6f,%.6f,%.6f", s.coordinate * 1e3, s.ok ? 1 : 0, s.visibility, s.visibility_err,
                      s.center * 1e6);
        report += s.ok ? "\n" : ",\"" + s.error + "\"\n";
    }
    open_output(out_dir, "envelope_report.txt") << report;
    return outcome;
}

ReconstructOutcome cmd_reconstruct(const RunConfig &cfg, const fs::path &out_dir) {
    echo_config(cfg, out_dir);
    auto band = cfg.grid(cfg.count("reconstruct.grid_points"));
    ReconstructOptions options;
    options.window = cfg.text("reconstruct.window") == "hann" ? Window::Hann : Window::None;
    options.demodulate = cfg.flag("reconstruct.demodulate");

    DelayLattice lattice;
    Interferogram ifg;
    std::optional<JointSpectrum> truth;
    std::string input = cfg.text("reconstruct.input");
    if (!input.empty()) {
        std::ifstream in(input);
        if (!in) {
            throw InvalidArgument("cannot open interferogram " + input);
        }
        ifg = read_interferogram_csv(in);
        lattice = lattice_of(ifg);
    } else {
        auto phi = sample_on_grid(cfg.amplitude(), band, cfg.filter(Arm::One), cfg.filter(Arm::Two));
        truth = jsi(phi);
        double half = cfg.number("reconstruct.spans") * smallest_coherence_time(*truth);
        double step1 = cfg.number("reconstruct.step1"), step2 = cfg.number("reconstruct.step2");
        if (!(step1 > 0)) {
            step1 = options.demodulate ? bandpass_step(band.axis1()) : nyquist_step(band);
        }
        if (!(step2 > 0)) {
            step2 = options.demodulate ? bandpass_step(band.axis2()) : nyquist_step(band);
        }
        lattice = DelayLattice::symmetric(half, step1, half, step2);
        check_sampling(lattice, band, options.demodulate);
        auto m = measure(cfg, scan_2d(phi, phi, lattice.axis1, lattice.axis2), 5);
        write_csv(cfg, out_dir, "recon_interferogram.csv", m.data);
        ifg = normalized_measurement(m);
    }
    ReconstructOutcome outcome{reconstruct_jsi(ifg, band, options), lattice, std::nullopt, std::nullopt, 0};
    outcome.correlation = outcome.estimate.degenerate ? 0 : spectral_moments(outcome.estimate.spectrum).correlation;
    if (truth) {
        outcome.roundtrip_error = relative_l2(outcome.estimate.spectrum, *truth);
        outcome.true_correlation = spectral_moments(*truth).correlation;
    }

    const auto &l = outcome.lattice;
    std::vector<std::string> header{"config_hash=" + cfg.hash_hex(), "window=" + to_string(options.window)};
    auto jsi_out = open_output(out_dir, "jsi.csv");
    write_jsi_csv(jsi_out, outcome.estimate.spectrum, header);

    std::string report = report_header(cfg, "joint spectral intensity from 1 - G");
    report += fmt("input = %s\n", input.empty() ? "synthetic" : input.c_str());
    report += fmt("lattice_tau_S_fs = %.6f,%.6f,%zu\n", l.axis1.start * 1e15, l.axis1.step * 1e15, l.axis1.count);
    report += fmt("lattice_tau_L_fs = %.6f,%.6f,%zu\n", l.axis2.start * 1e15, l.axis2.step * 1e15, l.axis2.count);
    report += fmt("lattice_symmetry = %s\n", l.symmetry() == DelayLattice::Symmetry::Full ? "full" : "half-plane");
    report += fmt("path = %s\nwindow = %s\n", options.demodulate ? "demodulated" : "absolute",
                  to_string(options.window).c_str());
    report += fmt("nyquist_step_fs = %.6f\n", nyquist_step(band) * 1e15);
    report += fmt("negative_fraction = %.6g\nraw_integral = %.9g\n", outcome.estimate.negative_fraction,
                  outcome.estimate.raw_integral);
    if (outcome.estimate.degenerate) {
        report += "warning = degenerate input, no interference in the interferogram\n";
    }
    report += fmt("correlation = %.6f\n", outcome.correlation);
    if (outcome.roundtrip_error) {
        report += fmt("true_correlation = %.6f\nroundtrip_error = %.6g\n", *outcome.true_correlation,
                      *outcome.roundtrip_error);
    }
    open_output(out_dir, "recon_report.txt") << report;
    return outcome;
}

BudgetOutcome cmd_budget(const RunConfig &cfg, const fs::path &out_dir) {
    auto budget = cfg.budget();
    auto det = cfg.detector();
    BudgetOutcome b;
    b.accidental_rate = budget.accidental_rate_for(det);
    b.pair_probability = budget.pair_probability_per_pulse;
    b.coincidence_rate = budget.coincidence_rate();
    double bin = cfg.number("budget.bin");
    b.text = report_header(cfg, "count budget");
    b.text += fmt("singles_hz = %.6g, %.6g\n", budget.singles_rate_1, budget.singles_rate_2);
    b.text += fmt("trigger_rate_hz = %.6g\n", det.trigger_rate);
    b.text += fmt("accidental_rate_hz = %.6f\n", b.accidental_rate);
    b.text += fmt("pair_probability = %.3f\n", b.pair_probability);
    b.text += fmt("pair probability: %.2f per pulse\n", b.pair_probability);
    b.text += fmt("coincidence_rate_hz = %.6f\n", b.coincidence_rate);
    b.text += fmt("coincidences_per_bin = %.6f\naccidentals_per_bin = %.6f\nbin_s = %.6g\n", b.coincidence_rate * bin,
                  b.accidental_rate * bin, bin);
    echo_config(cfg, out_dir);
    open_output(out_dir, "budget_report.txt") << b.text;
    return b;
}

}  // namespace biphoton
