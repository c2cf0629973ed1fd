/*
 * Copyright (C) 2026 The prtkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PRT_ERROR_H
#define PRT_ERROR_H

#include <stdexcept>
#include <string>

namespace prt {

// Raised for malformed inputs, inconsistent maps and failed I/O. The CLI maps
// these to exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when a caller breaks an operation's precondition (non-unit vectors,
// bad parameter ranges).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace prt

#endif  // PRT_ERROR_H
