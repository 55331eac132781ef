#pragma once

#include <stdexcept>
#include <string>

namespace oed {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Incompatible matrix/vector shapes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Hankel depth outside the legal range for the given sequence.
class DepthRangeError : public Error {
 public:
  using Error::Error;
};

/// Sequence too short to form the requested Hankel matrix.
class SequenceTooShortError : public Error {
 public:
  using Error::Error;
};

/// The analysis requires a nonzero input sequence.
class ZeroInputError : public Error {
 public:
  using Error::Error;
};

/// Prior knowledge (lag/state bounds) contradicted by the data.
class PriorBoundsError : public Error {
 public:
  using Error::Error;
};

/// The depth-k rank condition admits no avoidance hyperplane: the inner
/// design loop is finished at this depth.
class DepthExhaustedError : public Error {
 public:
  using Error::Error;
};

/// A replayed input deviates from the recording, or a recorded input
/// violates a design constraint.
class ReplayMismatchError : public Error {
 public:
  using Error::Error;
};

/// Operation requires a minimal system.
class NotMinimalError : public Error {
 public:
  using Error::Error;
};

/// Identification was requested on data that are not informative.
class NotInformativeError : public Error {
 public:
  using Error::Error;
};

/// Randomized construction exceeded its resampling cap.
class ResamplingError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or input file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Internal consistency guard tripped; indicates a bug.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace oed
