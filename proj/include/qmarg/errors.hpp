/*
 * Copyright 2026 The qmarg Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace qmarg {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Matrix shapes do not fit the operation (non-square permanent, shape mismatch).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A mode index lies outside [0, N).
class BoundsError : public Error {
public:
    using Error::Error;
};

/// Transmission matrix fails the unitarity check.
class UnitarityError : public Error {
public:
    using Error::Error;
};

/// Malformed input state (duplicate modes, overlap, odd photon number, ...).
class InvalidStateError : public Error {
public:
    using Error::Error;
};

/// Marginal query that the formulas do not cover (k > n, repeated modes, ...).
class InvalidQueryError : public Error {
public:
    using Error::Error;
};

/// An enumeration would exceed its configured size bound.
class EnumerationLimitError : public Error {
public:
    using Error::Error;
};

/// Numerical self-consistency violated; indicates a bug rather than bad input.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Input file or JSON document could not be parsed or validated.
class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace qmarg
