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

#pragma once

#include <stdexcept>
#include <string>

namespace cjt {

/// Base class of every exception raised by the core library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad configuration keys, out-of-range parameters,
/// inconsistent topologies or mismatched container sizes.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// An iteration failed to converge or a factorization broke down.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double residual = 0.0)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// The SINR targets cannot be met (negative scaling factors, divergent
/// multipliers, rank-deficient zero-forcing systems, ...).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

} // namespace cjt
