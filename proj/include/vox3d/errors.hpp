#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vox3d {

/// Base of every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation that needs foreground voxels (or a non-empty volume) got none.
class EmptyInputError : public Error {
 public:
  using Error::Error;
};

/// Rasterization produced zero voxels; the shape is degenerate at this resolution.
class EmptyRasterizationError : public Error {
 public:
  using Error::Error;
};

class InvalidConfigError : public Error {
 public:
  using Error::Error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class UnsupportedRotationError : public Error {
 public:
  using Error::Error;
};

/// A generator exhausted its retry budget.
class GenerationFailureError : public Error {
 public:
  GenerationFailureError(const std::string& what, int retries)
      : Error(what + " (after " + std::to_string(retries) + " retries)"), retries_(retries) {}
  int retries() const noexcept { return retries_; }

 private:
  int retries_;
};

/// Construction broke an invariant it is supposed to guarantee.
class InternalConsistencyError : public Error {
 public:
  using Error::Error;
};

class InvalidBatchError : public Error {
 public:
  using Error::Error;
};

class MissingGroundTruthError : public Error {
 public:
  using Error::Error;
};

/// A metric is mathematically undefined for the given input.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

class IncompatibleDatasetsError : public Error {
 public:
  using Error::Error;
};

class AlreadyPackedError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed dataset file; carries the byte offset where parsing failed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::uint64_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

class BadMagicError : public ParseError {
 public:
  using ParseError::ParseError;
};

class TruncatedError : public ParseError {
 public:
  TruncatedError(std::uint64_t offset, std::uint64_t expected, std::uint64_t actual)
      : ParseError("truncated file: expected " + std::to_string(expected) + " bytes, got " +
                       std::to_string(actual),
                   offset),
        expected_(expected),
        actual_(actual) {}
  std::uint64_t expected() const noexcept { return expected_; }
  std::uint64_t actual() const noexcept { return actual_; }

 private:
  std::uint64_t expected_;
  std::uint64_t actual_;
};

class BadVoxelError : public ParseError {
 public:
  using ParseError::ParseError;
};

}  // namespace vox3d
