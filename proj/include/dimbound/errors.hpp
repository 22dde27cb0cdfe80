// Copyright 2026 The dimbound Authors
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

namespace dimbound {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// An input violates a documented invariant (non-physical state, bad dimensions, out-of-range parameter).
class ValidationError : public Error {
   public:
    using Error::Error;
};

/// Malformed scenario or report text.
class ParseError : public Error {
   public:
    using Error::Error;
};

/// A numerical routine failed to produce a trustworthy answer (e.g. eigensolver non-convergence).
class NumericalError : public Error {
   public:
    using Error::Error;
};

}  // namespace dimbound
