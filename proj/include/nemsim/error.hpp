/*
 * Copyright 2026 The nemsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nemsim {

/// Base class of every error raised by the simulator.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PrecisionOverflow : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class GeometryViolation : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class UnknownLink : public Error {
 public:
  using Error::Error;
};

class AddressOutOfRange : public Error {
 public:
  using Error::Error;
};

class SwapInProgress : public Error {
 public:
  using Error::Error;
};

class Unschedulable : public Error {
 public:
  Unschedulable(std::string layer, const std::string& why)
      : Error("layer '" + layer + "' is unschedulable: " + why), layer_(std::move(layer)) {}
  const std::string& layer() const noexcept { return layer_; }

 private:
  std::string layer_;
};

/// Malformed input file. `line()` is 1-based; 0 means the whole file.
class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line, const std::string& why)
      : Error(file + ":" + std::to_string(line) + ": " + why), file_(std::move(file)), line_(line) {}
  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

class FitDiverged : public Error {
 public:
  using Error::Error;
};

}  // namespace nemsim
