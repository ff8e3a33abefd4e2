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
// ------------------------------------------------------------------------

#ifndef MMFSEC_ERRORS_HPP
#define MMFSEC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mmfsec {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Matrix or vector sizes that do not fit together.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Arguments outside the mathematical domain of an operation (n = 0, non-PSD
// covariance, draws = 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// A loss profile or threshold that cannot be realised.
class InfeasibleError : public DomainError {
public:
    using DomainError::DomainError;
};

// Malformed command-line input (unknown scheme, bad range syntax).
class UsageError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::string field, const std::string &what)
        : Error("field '" + field + "': " + what), field_(std::move(field)) {}

    const std::string &field() const noexcept { return field_; }

private:
    std::string field_;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace mmfsec

#endif
