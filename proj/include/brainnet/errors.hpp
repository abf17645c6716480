// Copyright 2026 The Brainnet Authors.
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace brainnet {

// Base class for every typed error thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- recording ingest ---

class TruncatedHeader : public Error {
 public:
  using Error::Error;
};

class MalformedField : public Error {
 public:
  using Error::Error;
};

class DegenerateScaling : public Error {
 public:
  using Error::Error;
};

class TruncatedRecords : public Error {
 public:
  TruncatedRecords(const std::string& msg, std::size_t records_recovered)
      : Error(msg), records_recovered(records_recovered) {}
  std::size_t records_recovered;
};

class MissingChannel : public Error {
 public:
  MissingChannel(const std::string& msg, std::string label)
      : Error(msg), label(std::move(label)) {}
  std::string label;
};

// --- signal processing ---

class InvalidCutoff : public Error {
 public:
  using Error::Error;
};

class UpsamplingRequested : public Error {
 public:
  using Error::Error;
};

class WindowTooLong : public Error {
 public:
  using Error::Error;
};

class SegmentTooLong : public Error {
 public:
  using Error::Error;
};

class TooFewSegments : public Error {
 public:
  using Error::Error;
};

class EmptyBand : public Error {
 public:
  using Error::Error;
};

// --- electrode geometry ---

class UnknownElectrode : public Error {
 public:
  UnknownElectrode(const std::string& msg, std::string label)
      : Error(msg), label(std::move(label)) {}
  std::string label;
};

class DegenerateMidpoint : public Error {
 public:
  using Error::Error;
};

// --- model ---

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class AsymmetricInput : public Error {
 public:
  using Error::Error;
};

class NegativeWeight : public Error {
 public:
  using Error::Error;
};

class NonFiniteLoss : public Error {
 public:
  using Error::Error;
};

// --- persistence ---

class CorruptCache : public Error {
 public:
  using Error::Error;
};

// --- evaluation protocol ---

class TooFewSubjects : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class FoldWithoutTestData : public Error {
 public:
  using Error::Error;
};

}  // namespace brainnet
