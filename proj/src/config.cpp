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

#include "biphoton/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <span>
#include <sstream>

#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

namespace {

enum class Kind { Number, Count, Text, Flag, Length, Time, Rate, OptionalRate, TimeList };

struct KeySpec {
    const char *section;
    const char *base;
    Kind kind;
    const char *unit;
    const char *fallback;
    const char *choices = nullptr;
    bool positive = false;
};

// clang-format off
const KeySpec kSchema[] = {
    {"source", "model", Kind::Text, "", "pump_derived", "pump_derived|gaussian"},
    {"source", "pump_wavelength", Kind::Length, "nm", "774.87", nullptr, true},
    {"source", "pump_duration", Kind::Time, "ps", "3.5"},
    {"source", "signal_wavelength", Kind::Length, "nm", "1530", nullptr, true},
    {"source", "idler_wavelength", Kind::Length, "nm", "1570", nullptr, true},
    {"source", "gvd_spread", Kind::TimeList, "ps", "2.34"},
    {"source", "single_photon_fwhm", Kind::Length, "nm", "194", nullptr, true},
    {"source", "single_photon_reference", Kind::Length, "nm", "1550", nullptr, true},
    {"source", "fwhm1", Kind::Length, "nm", "8", nullptr, true},
    {"source", "fwhm2", Kind::Length, "nm", "8", nullptr, true},
    {"source", "rho", Kind::Number, "", "0"},
    {"source", "grid_points", Kind::Count, "", "256", nullptr, true},

    {"filters", "shape", Kind::Text, "", "rectangular", "rectangular|gaussian|none"},
    {"filters", "width1", Kind::Length, "nm", "18", nullptr, true},
    {"filters", "width2", Kind::Length, "nm", "18", nullptr, true},

    {"detector", "efficiency", Kind::Number, "", "0.15"},
    {"detector", "trigger_rate", Kind::Rate, "mhz", "4"},
    {"detector", "coincidence_window", Kind::Time, "ns", "10"},

    {"budget", "singles1", Kind::Rate, "khz", "95"},
    {"budget", "singles2", Kind::Rate, "khz", "91"},
    {"budget", "coupling_efficiency", Kind::Number, "", "0.3"},
    {"budget", "coincidence_to_singles", Kind::Number, "", "0.047"},
    {"budget", "car", Kind::Number, "", "2.68"},
    {"budget", "accidental_rate", Kind::OptionalRate, "hz", ""},
    {"budget", "bin", Kind::Time, "s", "10", nullptr, true},

    {"jitter", "contributions", Kind::TimeList, "ps", "3.5, 2.34, 2.34"},
    {"jitter", "v_cap", Kind::Number, "", "0.3333333333333333"},

    {"fringe", "wide_span", Kind::Length, "um", "350", nullptr, true},
    {"fringe", "wide_step", Kind::Length, "um", "0.2", nullptr, true},
    {"fringe", "fine_span", Kind::Length, "um", "3", nullptr, true},
    {"fringe", "fine_step", Kind::Length, "um", "0.15", nullptr, true},
    {"fringe", "delta_x1", Kind::Length, "mm", "0"},

    {"dip", "span", Kind::Length, "mm", "5", nullptr, true},
    {"dip", "step", Kind::Length, "um", "10", nullptr, true},

    {"scan2d", "x1_span", Kind::Length, "mm", "2", nullptr, true},
    {"scan2d", "x1_step", Kind::Length, "mm", "0.1", nullptr, true},
    {"scan2d", "x2_span", Kind::Length, "mm", "2.35", nullptr, true},
    {"scan2d", "x2_step", Kind::Length, "um", "0.5", nullptr, true},

    {"reconstruct", "input", Kind::Text, "", ""},
    {"reconstruct", "demodulate", Kind::Flag, "", "true"},
    {"reconstruct", "window", Kind::Text, "", "none", "none|hann"},
    {"reconstruct", "spans", Kind::Number, "", "5", nullptr, true},
    {"reconstruct", "step1", Kind::Time, "fs", "0"},
    {"reconstruct", "step2", Kind::Time, "fs", "0"},
    {"reconstruct", "grid_points", Kind::Count, "", "64", nullptr, true},

    {"run", "seed", Kind::Count, "", "1"},
    {"run", "noiseless", Kind::Flag, "", "false"},
};
// clang-format on

struct Unit {
    const char *suffix;
    double factor;
};

constexpr std::array<Unit, 4> kLengthUnits{{{"m", 1}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}}};
constexpr std::array<Unit, 6> kTimeUnits{{{"s", 1}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12}, {"fs", 1e-15}}};
constexpr std::array<Unit, 4> kRateUnits{{{"hz", 1}, {"khz", 1e3}, {"mhz", 1e6}, {"ghz", 1e9}}};

std::span<const Unit> units_for(Kind k) {
    switch (k) {
        case Kind::Length:
            return kLengthUnits;
        case Kind::Time:
        case Kind::TimeList:
            return kTimeUnits;
        case Kind::Rate:
        case Kind::OptionalRate:
            return kRateUnits;
        default:
            return {};
    }
}

double unit_factor(Kind k, const std::string &suffix) {
    for (const auto &u : units_for(k)) {
        if (suffix == u.suffix) {
            return u.factor;
        }
    }
    throw InvalidArgument("unknown unit " + suffix);
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return "";
    }
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string shortest(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

std::optional<double> parse_double(const std::string &s) {
    double v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

const KeySpec *find_spec(const std::string &name) {
    for (const auto &k : kSchema) {
        if (name == std::string(k.section) + "." + k.base) {
            return &k;
        }
    }
    return nullptr;
}

bool known_section(const std::string &s) {
    return std::any_of(std::begin(kSchema), std::end(kSchema), [&](const KeySpec &k) { return s == k.section; });
}

// Resolves `key` within `section` to its schema entry and the unit factor relative to canonical.
const KeySpec *resolve_key(const std::string &section, const std::string &key, double &ratio) {
    for (const auto &k : kSchema) {
        if (section != k.section) {
            continue;
        }
        std::string base = k.base;
        auto units = units_for(k.kind);
        if (units.empty()) {
            if (key == base) {
                ratio = 1;
                return &k;
            }
            continue;
        }
        if (key.size() > base.size() + 1 && key.compare(0, base.size(), base) == 0 && key[base.size()] == '_') {
            std::string suffix = key.substr(base.size() + 1);
            for (const auto &u : units) {
                if (suffix == u.suffix) {
                    ratio = u.factor / unit_factor(k.kind, k.unit);
                    return &k;
                }
            }
        }
        if (key == base) {
            throw InvalidArgument("key '" + key + "' needs a unit suffix, e.g. " + base + "_" + k.unit);
        }
    }
    return nullptr;
}

std::string canonical_value(const KeySpec &spec, const std::string &raw, double ratio) {
    auto convert = [&](const std::string &s) {
        auto v = parse_double(s);
        if (!v) {
            throw InvalidArgument("'" + s + "' is not a number");
        }
        if (spec.positive && !(*v > 0)) {
            throw InvalidArgument(std::string(spec.base) + " must be positive");
        }
        return shortest(ratio == 1 ? *v : *v * ratio);
    };
    switch (spec.kind) {
        case Kind::Text:
            if (spec.choices) {
                std::string v = lower(raw);
                std::string choices = std::string("|") + spec.choices + "|";
                if (v.empty() || choices.find("|" + v + "|") == std::string::npos) {
                    throw InvalidArgument("'" + raw + "' is not one of " + spec.choices);
                }
                return v;
            }
            return raw;
        case Kind::Flag: {
            std::string v = lower(raw);
            if (v == "true" || v == "1" || v == "yes" || v == "on") {
                return "true";
            }
            if (v == "false" || v == "0" || v == "no" || v == "off") {
                return "false";
            }
            throw InvalidArgument("'" + raw + "' is not a boolean");
        }
        case Kind::Count: {
            unsigned long long n = 0;
            auto [end, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), n);
            if (ec != std::errc{} || end != raw.data() + raw.size() || (spec.positive && n == 0)) {
                throw InvalidArgument("'" + raw + "' is not a " + (spec.positive ? "positive " : "") + "integer");
            }
            return std::to_string(n);
        }
        case Kind::OptionalRate:
            return raw.empty() ? "" : convert(raw);
        case Kind::TimeList: {
            std::string out;
            std::stringstream ss(raw);
            std::string item;
            while (std::getline(ss, item, ',')) {
                item = trim(item);
                if (item.empty()) {
                    continue;
                }
                out += (out.empty() ? "" : ", ") + convert(item);
            }
            return out;
        }
        default:
            return convert(raw);
    }
}

}  // namespace

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

RunConfig::RunConfig() {
    for (const auto &k : kSchema) {
        entries_[std::string(k.section) + "." + k.base] = Entry{k.fallback, 0};
    }
}

void RunConfig::set(const std::string &section, const std::string &key, const std::string &value, std::size_t line) {
    if (!known_section(section)) {
        throw ConfigError(line, "unknown section [" + section + "]");
    }
    try {
        double ratio = 1;
        const KeySpec *spec = resolve_key(section, key, ratio);
        if (!spec) {
            throw InvalidArgument("unknown key '" + key + "' in [" + section + "]");
        }
        entries_[section + "." + spec->base] = Entry{canonical_value(*spec, value, ratio), line};
    } catch (const ConfigError &) {
        throw;
    } catch (const Error &e) {
        throw ConfigError(line, e.what());
    }
}

RunConfig RunConfig::parse(std::istream &in) {
    RunConfig cfg;
    std::string section;
    std::string raw;
    std::size_t line = 0;
    std::map<std::string, std::size_t> seen;
    while (std::getline(in, raw)) {
        line++;
        auto hash = raw.find_first_of("#;");
        std::string s = trim(std::string_view(raw).substr(0, hash));
        if (s.empty()) {
            continue;
        }
        if (s.front() == '[') {
            if (s.back() != ']') {
                throw ConfigError(line, "unterminated section header");
            }
            section = lower(trim(s.substr(1, s.size() - 2)));
            if (!known_section(section)) {
                throw ConfigError(line, "unknown section [" + section + "]");
            }
            cfg.section_lines_.emplace(section, line);
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(line, "expected key = value");
        }
        if (section.empty()) {
            throw ConfigError(line, "key outside of any section");
        }
        std::string key = lower(trim(s.substr(0, eq)));
        std::string value = trim(s.substr(eq + 1));
        auto [it, fresh] = seen.emplace(section + "." + key, line);
        if (!fresh) {
            throw ConfigError(line, "duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")");
        }
        cfg.set(section, key, value, line);
    }
    cfg.validate();
    return cfg;
}

RunConfig RunConfig::load(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(0, "cannot open " + path);
    }
    return parse(in);
}

void RunConfig::apply_override(const std::string &assignment) {
    auto eq = assignment.find('=');
    auto dot = assignment.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
        throw ConfigError(0, "override '" + assignment + "' is not section.key=value");
    }
    set(lower(trim(assignment.substr(0, dot))), lower(trim(assignment.substr(dot + 1, eq - dot - 1))),
        trim(assignment.substr(eq + 1)), 0);
}

const RunConfig::Entry &RunConfig::entry(const std::string &name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) {
        throw InvalidArgument("no configuration key " + name);
    }
    return it->second;
}

std::size_t RunConfig::section_line(const std::string &section) const {
    auto it = section_lines_.find(section);
    return it == section_lines_.end() ? 0 : it->second;
}

double RunConfig::number(const std::string &name) const {
    const KeySpec *spec = find_spec(name);
    auto v = parse_double(entry(name).value);
    if (!v) {
        throw ConfigError(entry(name).line, name + " has no numeric value");
    }
    auto units = units_for(spec->kind);
    return units.empty() ? *v : *v * unit_factor(spec->kind, spec->unit);
}

std::optional<double> RunConfig::optional_number(const std::string &name) const {
    if (entry(name).value.empty()) {
        return std::nullopt;
    }
    return number(name);
}

std::vector<double> RunConfig::list(const std::string &name) const {
    const KeySpec *spec = find_spec(name);
    std::vector<double> out;
    std::stringstream ss(entry(name).value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(*parse_double(item) * unit_factor(spec->kind, spec->unit));
        }
    }
    return out;
}

std::string RunConfig::text(const std::string &name) const { return entry(name).value; }

bool RunConfig::flag(const std::string &name) const { return entry(name).value == "true"; }

std::size_t RunConfig::count(const std::string &name) const { return std::stoull(entry(name).value); }

std::string RunConfig::resolved() const {
    std::string out;
    std::string section;
    for (const auto &k : kSchema) {
        if (section != k.section) {
            section = k.section;
            out += (out.empty() ? "[" : "\n[") + section + "]\n";
        }
        std::string key = k.base;
        if (!units_for(k.kind).empty()) {
            key += std::string("_") + k.unit;
        }
        out += key + " = " + entries_.at(section + "." + k.base).value + "\n";
    }
    return out;
}

std::uint64_t RunConfig::hash() const { return fnv1a64(resolved()); }

std::string RunConfig::hash_hex() const {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash()));
    return buf;
}

BiphotonAmplitude RunConfig::amplitude() const {
    double l1 = number("source.signal_wavelength"), l2 = number("source.idler_wavelength");
    if (text("source.model") == "gaussian") {
        GaussianModel m{wavelength_to_angular(l1), wavelength_to_angular(l2),
                        fwhm_to_sigma(wavelength_width_to_angular(number("source.fwhm1"), l1)),
                        fwhm_to_sigma(wavelength_width_to_angular(number("source.fwhm2"), l2)),
                        number("source.rho")};
        return BiphotonAmplitude::gaussian(m);
    }
    SourceParams src{number("source.pump_wavelength"), number("source.pump_duration"), l1, l2};
    src.validate();
    auto gvd = list("source.gvd_spread");
    double lc = two_photon_coherence_length(src, gvd);
    double single = wavelength_width_to_angular(number("source.single_photon_fwhm"),
                                                number("source.single_photon_reference"));
    return BiphotonAmplitude::gaussian(pump_derived_model(src, lc, single));
}

std::optional<SpectralFilter> RunConfig::filter(Arm arm) const {
    std::string shape = text("filters.shape");
    if (shape == "none") {
        return std::nullopt;
    }
    auto s = shape == "gaussian" ? SpectralFilter::Shape::Gaussian : SpectralFilter::Shape::Rectangular;
    if (arm == Arm::One) {
        return SpectralFilter::from_wavelength(s, number("source.signal_wavelength"), number("filters.width1"));
    }
    return SpectralFilter::from_wavelength(s, number("source.idler_wavelength"), number("filters.width2"));
}

FrequencyGrid RunConfig::grid(std::size_t n) const {
    return default_grid(amplitude(), filter(Arm::One), filter(Arm::Two), n, n);
}

DetectorConfig RunConfig::detector() const {
    DetectorConfig d{number("detector.efficiency"), number("detector.trigger_rate"),
                     number("detector.coincidence_window")};
    d.validate();
    return d;
}

SourceBudget RunConfig::budget() const {
    SourceBudget b;
    b.singles_rate_1 = number("budget.singles1");
    b.singles_rate_2 = number("budget.singles2");
    b.car = number("budget.car");
    b.pair_probability_per_pulse = pair_probability_from_car(b.car);
    b.coupling_efficiency = number("budget.coupling_efficiency");
    b.coincidence_to_singles = number("budget.coincidence_to_singles");
    b.accidental_rate = optional_number("budget.accidental_rate");
    b.validate();
    return b;
}

JitterModel RunConfig::jitter() const {
    JitterModel j;
    auto spreads = list("jitter.contributions");
    for (std::size_t k = 0; k < spreads.size(); k++) {
        j.add("contribution " + std::to_string(k + 1), spreads[k]);
    }
    return j;
}

void RunConfig::validate() const {
    auto guard = [&](const std::string &section, auto &&fn) {
        try {
            fn();
        } catch (const ConfigError &) {
            throw;
        } catch (const Error &e) {
            throw ConfigError(section_line(section), "[" + section + "] " + e.what());
        }
    };
    guard("source", [&] { (void)amplitude(); });
    guard("filters", [&] { (void)filter(Arm::One), (void)filter(Arm::Two); });
    guard("detector", [&] { (void)detector(); });
    guard("budget", [&] { (void)budget(); });
    guard("jitter", [&] {
        (void)jitter().combined_rms();
        double cap = number("jitter.v_cap");
        if (!(cap > 0 && cap <= 1)) {
            throw InvalidArgument("v_cap must lie in (0, 1]");
        }
    });
}

}  // namespace biphoton
