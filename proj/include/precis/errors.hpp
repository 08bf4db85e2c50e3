// Copyright 2026 The Precis Authors. All Rights Reserved.
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

namespace precis {

/// Base class for all precis errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model or input validation failures (bad parameters, shapes, configs).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class NonPSDCovariance : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ShapeMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NonMonotoneThresholds : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class GridTooCoarse : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Computation failures.

class InadmissiblePattern : public Error {
 public:
  using Error::Error;
};

class ZeroMarginal : public Error {
 public:
  using Error::Error;
};

class PatternSpaceTooLarge : public Error {
 public:
  using Error::Error;
};

class SingularTheta : public Error {
 public:
  using Error::Error;
};

class DegenerateSum : public Error {
 public:
  using Error::Error;
};

class DegenerateOutcome : public Error {
 public:
  using Error::Error;
};

class DegenerateRegressor : public Error {
 public:
  using Error::Error;
};

class IllConditionedBasis : public Error {
 public:
  using Error::Error;
};

/// Requested analytic coefficients for a model family without closed forms.
class UnsupportedAnalytic : public Error {
 public:
  using Error::Error;
};

/// Operation not defined for this model family (e.g. category probabilities
/// of a continuous-response model).
class UnsupportedModel : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace precis
