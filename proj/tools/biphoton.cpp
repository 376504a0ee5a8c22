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

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "biphoton/commands.hpp"
#include "biphoton/errors.hpp"

using namespace biphoton;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kFit = 3, kAliasing = 4 };

void print_fringe(const FringeOutcome &o) {
    std::printf("pi_sigma_x_mm %.6f\nperiod_nm %.4f\nvisibility_wide %.6f\nvisibility %.6f +- %.6f\n",
                3.141592653589793 * o.wide.sigma_x * 1e3, o.wide.wavelength * 1e9, o.wide.visibility,
                o.fine.visibility, o.fine.visibility_err);
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"biphoton: two-photon interference simulation, fitting and JSI reconstruction"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    bool noiseless = false;
    std::string input;
    app.add_option("--config", config_path, "configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "noise seed (run.seed)");
    app.add_option("--out", out_dir, "output directory");
    app.add_flag("--noiseless", noiseless, "skip counting noise (run.noiseless)");
    app.add_option("--set", overrides, "override, section.key=value");

    auto *fringe = app.add_subcommand("fringe", "delta_x2 fringe scan and fit");
    auto *dip = app.add_subcommand("hom-dip", "independent-photon HOM dip");
    auto *scan2d = app.add_subcommand("scan2d", "2D scan and visibility envelope");
    auto *recon = app.add_subcommand("reconstruct", "JSI from a 2D interferogram");
    recon->add_option("--input", input, "interferogram CSV (otherwise synthesized)");
    auto *budget = app.add_subcommand("budget", "count-rate arithmetic");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = config_path.empty() ? RunConfig() : RunConfig::load(config_path);
        for (const auto &o : overrides) {
            cfg.apply_override(o);
        }
        if (seed) {
            cfg.set("run", "seed", std::to_string(*seed));
        }
        if (noiseless) {
            cfg.set("run", "noiseless", "true");
        }
        if (!input.empty()) {
            cfg.set("reconstruct", "input", input);
        }
        cfg.validate();

        if (fringe->parsed()) {
            print_fringe(cmd_fringe(cfg, out_dir));
        } else if (dip->parsed()) {
            auto o = cmd_hom_dip(cfg, out_dir);
            std::printf("visibility_percent %.3f +- %.3f\nfwhm_mm %.4f\njitter_fwhm_mm %.4f\n",
                        100 * o.fit.visibility, 100 * o.fit.visibility_err, o.fit.fwhm * 1e3, o.jitter_fwhm * 1e3);
        } else if (scan2d->parsed()) {
            auto o = cmd_scan2d(cfg, out_dir);
            std::printf("envelope_fwhm_mm %.4f\ndiagonal_correlation %.4f\nsignature %s\n",
                        o.envelope.fit.fwhm * 1e3, o.diagonal_correlation, o.signature.c_str());
        } else if (recon->parsed()) {
            auto o = cmd_reconstruct(cfg, out_dir);
            if (o.estimate.degenerate) {
                std::fprintf(stderr, "warning: degenerate interferogram, no interference\n");
            }
            std::printf("correlation %.4f\nnegative_fraction %.4g\n", o.correlation, o.estimate.negative_fraction);
            if (o.roundtrip_error) {
                std::printf("roundtrip_error %.4g\n", *o.roundtrip_error);
            }
        } else if (budget->parsed()) {
            std::fputs(cmd_budget(cfg, out_dir).text.c_str(), stdout);
        }
    } catch (const ConfigError &e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const AliasingError &e) {
        std::fprintf(stderr, "aliasing: %s\n", e.what());
        return kAliasing;
    } catch (const FitError &e) {
        std::fprintf(stderr, "fit failed: %s\n", e.what());
        return kFit;
    } catch (const InvalidArgument &e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kConfig;
    } catch (const DimensionError &e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kConfig;
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFailure;
    }
    return kOk;
}
