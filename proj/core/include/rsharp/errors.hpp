// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace rsharp {

/// Bad inputs: shapes that do not compose, invalid configs, malformed files.
/// The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The math gave up: non-convergence, non-normalizable spectra, divergence.
/// The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rsharp
