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

#ifndef BIPHOTON_ERRORS_HPP
#define BIPHOTON_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace biphoton {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
struct InvalidArgument : Error {
    using Error::Error;
};

/// A gridded quantity was queried outside the region it is defined on.
struct OutOfDomainError : Error {
    using Error::Error;
};

/// Filtering removed all spectral weight.
struct EmptySupportError : Error {
    using Error::Error;
};

/// Grids or lattices have incompatible shapes.
struct DimensionError : Error {
    using Error::Error;
};

struct DivisionError : Error {
    using Error::Error;
};

/// The delay lattice is too coarse for the requested reconstruction band.
struct AliasingError : Error {
    AliasingError(std::string axis_name, double step, double required_step);
    std::string axis;
    double step;
    double required_step;
};

enum class FitFailure { NonConvergence, InsufficientData, NoPeriod };

struct FitError : Error {
    FitError(FitFailure kind, const std::string &message, std::vector<double> last_iterate = {});
    FitFailure kind;
    std::vector<double> last_iterate;
};

/// Malformed configuration. `line` is 0 when the problem is not tied to one line.
struct ConfigError : Error {
    ConfigError(std::size_t line, const std::string &message);
    std::size_t line;
};

}  // namespace biphoton

#endif
