// Copyright 2026 The Qudit Control Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace qudit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Device or model parameters violate their invariants.
class InvalidSpecError : public Error {
  public:
    using Error::Error;
};

/// Coherence times are unphysical (T2 > 2 T1) or imply negative dephasing.
class InvalidCoherenceError : public InvalidSpecError {
  public:
    using InvalidSpecError::InvalidSpecError;
};

/// A configuration or data file is missing a field or has a wrong type.
class SchemaError : public Error {
  public:
    using Error::Error;
};

/// A file body disagrees with its header (truncation, bad number, ...).
class FormatError : public Error {
  public:
    using Error::Error;
};

/// Requested value lies outside the supported range (e.g. above Nyquist).
class RangeError : public Error {
  public:
    using Error::Error;
};

/// An iterative fit failed to converge. Carries the final residual.
class FitFailureError : public Error {
  public:
    FitFailureError(const std::string& what, double residual) : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

  private:
    double residual_;
};

/// Charge-basis truncation is too small for the requested accuracy.
class TruncationError : public Error {
  public:
    using Error::Error;
};

/// Time step too coarse for the piecewise-constant propagator (||H dt|| >= 1).
class RefineGridError : public Error {
  public:
    using Error::Error;
};

/// Step-halving estimate exceeded the integrator tolerance.
class AccuracyError : public Error {
  public:
    AccuracyError(const std::string& what, double estimate) : Error(what), estimate_(estimate) {}
    double estimate() const { return estimate_; }

  private:
    double estimate_;
};

/// Analytic gradient disagrees with finite differences.
class GradientIntegrityError : public Error {
  public:
    GradientIntegrityError(const std::string& what, double rel_error)
        : Error(what), rel_error_(rel_error) {}
    double relative_error() const { return rel_error_; }

  private:
    double rel_error_;
};

/// A quantity that must be real/physical came out otherwise.
class NumericIntegrityError : public Error {
  public:
    using Error::Error;
};

}  // namespace qudit
