// Copyright 2026 The altk Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace altk {

// Base for every error raised by the toolkit. CLI maps subclasses to exit
// codes (see tools/altk.cc).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input files: bad syntax, bad magic, truncated archives.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Lexicon / LM / graph vocabulary incompatibilities.
class VocabularyError : public Error {
 public:
  using Error::Error;
};

// Configuration keys and values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace altk
