// Copyright 2026 The GaP Authors. All Rights Reserved.
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

#ifndef GAP_ERROR_HPP
#define GAP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace gap {

// Precondition violations on caller-supplied values.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Index or resource that does not exist (identity id, photo index, file).
class NotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by toy_embed when the projected feature vector has no direction.
class DegenerateEmbedding : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Base for every failure that originates in a similarity oracle. The
// optimizer catches this family to return best-so-far results.
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TransportError : public OracleError {
 public:
  using OracleError::OracleError;
};

class ProtocolError : public OracleError {
 public:
  using OracleError::OracleError;
};

class BudgetExceeded : public OracleError {
 public:
  using OracleError::OracleError;
};

}  // namespace gap

#endif  // GAP_ERROR_HPP
