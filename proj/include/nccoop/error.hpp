// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NCCOOP_ERROR_HPP
#define NCCOOP_ERROR_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace nccoop {

/// Invalid argument: out-of-range value, dimension mismatch, bad configuration.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input that is well-formed but geometrically degenerate (e.g. a zero channel vector).
class DegenerateInputError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A condition that should be unreachable for valid inputs.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// The dual search observed behaviour that only occurs when the inner search
/// grid is too coarse. Refine the search configuration and retry.
class SearchResolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw ParameterError(std::string(what) + " must be finite");
}

inline void check_non_negative(double v, const char* what) {
    check_finite(v, what);
    if (v < 0.0) throw ParameterError(std::string(what) + " must be non-negative");
}

}  // namespace detail
}  // namespace nccoop

#endif
