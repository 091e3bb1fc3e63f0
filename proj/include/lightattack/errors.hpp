// Copyright 2026 The lightattack Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LIGHTATTACK_ERRORS_HPP
#define LIGHTATTACK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lightattack {

// Base of every error the library throws. Each failure named by an operation
// contract has its own type so callers (and tests) can dispatch on it.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define LIGHTATTACK_DEFINE_ERROR(Name, Base) \
    class Name : public Base {               \
    public:                                  \
        using Base::Base;                    \
    }

LIGHTATTACK_DEFINE_ERROR(InvalidArgument, Error);

// imaging
LIGHTATTACK_DEFINE_ERROR(NonDivisibleDimensions, Error);
LIGHTATTACK_DEFINE_ERROR(MalformedHeader, Error);
LIGHTATTACK_DEFINE_ERROR(UnsupportedMaxval, Error);
LIGHTATTACK_DEFINE_ERROR(TruncatedData, Error);

// scene
LIGHTATTACK_DEFINE_ERROR(DimensionMismatch, Error);

// classifier
LIGHTATTACK_DEFINE_ERROR(MissingClassExamples, Error);
LIGHTATTACK_DEFINE_ERROR(WrongImageSize, Error);
LIGHTATTACK_DEFINE_ERROR(IndexOutOfRange, Error);
LIGHTATTACK_DEFINE_ERROR(TransportError, Error);
LIGHTATTACK_DEFINE_ERROR(ClassifierUnavailable, TransportError);
LIGHTATTACK_DEFINE_ERROR(ProtocolViolation, Error);
LIGHTATTACK_DEFINE_ERROR(NormalizationError, Error);

// harness
LIGHTATTACK_DEFINE_ERROR(EmptyInput, Error);
LIGHTATTACK_DEFINE_ERROR(SingleSample, Error);
LIGHTATTACK_DEFINE_ERROR(MissingCondition, Error);

// config files
LIGHTATTACK_DEFINE_ERROR(ConfigError, Error);

#undef LIGHTATTACK_DEFINE_ERROR

} // namespace lightattack

#endif // LIGHTATTACK_ERRORS_HPP
