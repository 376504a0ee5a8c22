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

#include "biphoton/errors.hpp"

#include <sstream>

namespace biphoton {

namespace {

std::string aliasing_message(const std::string &axis, double step, double required) {
    std::ostringstream out;
    out.precision(6);
    out << "delay lattice aliases on axis " << axis << ": step " << step << " s exceeds the allowed " << required
        << " s";
    return out.str();
}

std::string config_message(std::size_t line, const std::string &message) {
    if (line == 0) {
        return "config: " + message;
    }
    return "config line " + std::to_string(line) + ": " + message;
}

}  // namespace

AliasingError::AliasingError(std::string axis_name, double step, double required_step)
    : Error(aliasing_message(axis_name, step, required_step)),
      axis(std::move(axis_name)),
      step(step),
      required_step(required_step) {
}

FitError::FitError(FitFailure kind, const std::string &message, std::vector<double> last_iterate)
    : Error(message), kind(kind), last_iterate(std::move(last_iterate)) {
}

ConfigError::ConfigError(std::size_t line, const std::string &message)
    : Error(config_message(line, message)), line(line) {
}

}  // namespace biphoton
