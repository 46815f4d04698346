// Copyright 2026 The gcnn Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace gcnn {

// Root of every error the library throws. Everything except IoError is a
// validation-class failure from the CLI's point of view.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed tree or interchange record.
class StructuralInputError : public Error {
 public:
  using Error::Error;
};

// A nonterminal that no rule can expand.
class UncoverableSymbolError : public Error {
 public:
  using Error::Error;
};

// Rule lhs does not match the frontier symbol.
class IllegalApplicationError : public Error {
 public:
  using Error::Error;
};

// Operation needs a frontier but the tree is complete.
class CompleteTreeError : public Error {
 public:
  using Error::Error;
};

class MissingRuleError : public Error {
 public:
  using Error::Error;
};

class IncompleteDerivationError : public Error {
 public:
  using Error::Error;
};

class OverlongDerivationError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// NaN or Inf produced by a forward op.
class NumericFault : public Error {
 public:
  using Error::Error;
};

// Graph used out of order (e.g. backward twice, backward on an empty graph).
class LifecycleError : public Error {
 public:
  using Error::Error;
};

class CheckpointIncompatible : public Error {
 public:
  using Error::Error;
};

// Frontier with no valid rule and no copy target.
class DeadEndError : public Error {
 public:
  using Error::Error;
};

// Bad arguments or configuration.
class InputError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gcnn
