/*
 * Copyright 2026 The OncoAgent Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
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

namespace oncoagent {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller passed a value outside the operation's domain.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Malformed input text. `offset()` is a byte offset for XML and a
/// 1-based line number for line-oriented formats (see `unit()`).
class ParseError : public Error {
public:
    enum class Unit { byte, line };

    ParseError(const std::string& what, std::size_t offset, Unit unit = Unit::byte)
        : Error(what), offset_(offset), unit_(unit) {}

    std::size_t offset() const noexcept { return offset_; }
    Unit unit() const noexcept { return unit_; }

private:
    std::size_t offset_;
    Unit unit_;
};

class EmptyDocumentError : public Error {
public:
    using Error::Error;
};

/// Data is internally inconsistent (dimension mismatch, rater item counts, ...).
class IntegrityError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Persisted index failed validation on load.
class CorruptionError : public Error {
public:
    using Error::Error;
};

/// Network-level failure. Safe to retry.
class TransportError : public Error {
public:
    using Error::Error;
};

class ProviderError : public Error {
public:
    using Error::Error;
};

class PlanError : public Error {
public:
    using Error::Error;
};

/// A "$call.field" argument reference could not be resolved.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// A model declined to answer; the run must be discarded and restarted.
class RefusalError : public Error {
public:
    using Error::Error;
};

} // namespace oncoagent
