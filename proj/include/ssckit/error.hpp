// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace ssc {

/// Base class of every error thrown by this library. Malformed input is
/// reported through one of the subclasses below, never by crashing.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Structurally invalid bytes or text: bad magic, truncated payload,
/// wrong field count.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Well-formed container holding values that violate a contract:
/// non-finite coordinate, non-orthonormal rotation, out-of-range label.
class DataError : public Error {
public:
    using Error::Error;
};

/// Caller passed arguments that violate an operation's preconditions.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Student/teacher sparse tensors share no voxel index.
class AlignmentError : public Error {
public:
    using Error::Error;
};

/// A loss or metric is mathematically undefined on the given input
/// (e.g. every voxel carries the ignore sentinel).
class UndefinedError : public Error {
public:
    using Error::Error;
};

/// Filesystem-level failure: file missing or unwritable.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace ssc
