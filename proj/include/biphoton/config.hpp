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

#ifndef BIPHOTON_CONFIG_HPP
#define BIPHOTON_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "biphoton/counting.hpp"
#include "biphoton/spectrum.hpp"

namespace biphoton {

/// Sectioned `key = value` run configuration. Physical keys carry a unit suffix
/// (`width1_nm`, `bin_s`, `trigger_rate_mhz`, ...); any suffix of the right dimension is accepted
/// and stored in the key's canonical unit. Unset keys take the built-in defaults, which describe
/// the reference pulsed source with 18 nm filters.
class RunConfig {
   public:
    RunConfig();

    /// Throws ConfigError with the offending line number.
    static RunConfig parse(std::istream &in);
    static RunConfig load(const std::string &path);

    /// `section.key=value`, e.g. `filters.width2_nm=9`. Errors are reported against line 0.
    void apply_override(const std::string &assignment);
    void set(const std::string &section, const std::string &key, const std::string &value, std::size_t line = 0);

    /// Values in SI units; `name` is `section.base` without the unit suffix.
    double number(const std::string &name) const;
    std::optional<double> optional_number(const std::string &name) const;
    std::vector<double> list(const std::string &name) const;
    std::string text(const std::string &name) const;
    bool flag(const std::string &name) const;
    std::size_t count(const std::string &name) const;

    /// Every key in canonical units, sections and keys in schema order.
    std::string resolved() const;
    std::uint64_t hash() const;
    std::string hash_hex() const;

    BiphotonAmplitude amplitude() const;
    std::optional<SpectralFilter> filter(Arm arm) const;
    FrequencyGrid grid(std::size_t n) const;
    DetectorConfig detector() const;
    SourceBudget budget() const;
    JitterModel jitter() const;

    /// Builds every module-level type once; failures become ConfigError anchored at the section.
    void validate() const;

   private:
    struct Entry {
        std::string value;
        std::size_t line = 0;
    };
    std::map<std::string, Entry> entries_;
    std::map<std::string, std::size_t> section_lines_;

    const Entry &entry(const std::string &name) const;
    std::size_t section_line(const std::string &section) const;
};

std::uint64_t fnv1a64(std::string_view data);

}  // namespace biphoton

#endif
