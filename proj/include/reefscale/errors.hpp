#pragma once

#include <stdexcept>
#include <string>

namespace reefscale {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

// geometry
class NonPositiveDepth : public Error {
  public:
    explicit NonPositiveDepth(const std::string &msg) : Error(msg) {}
};
class RayAboveHorizon : public Error {
  public:
    explicit RayAboveHorizon(const std::string &msg) : Error(msg) {}
};
class DegeneratePolygon : public Error {
  public:
    explicit DegeneratePolygon(const std::string &msg) : Error(msg) {}
};

// tiling
class TileTooSmall : public Error {
  public:
    explicit TileTooSmall(const std::string &msg) : Error(msg) {}
};
class EmptyRaster : public Error {
  public:
    explicit EmptyRaster(const std::string &msg) : Error(msg) {}
};
class WindowOutOfBounds : public Error {
  public:
    explicit WindowOutOfBounds(const std::string &msg) : Error(msg) {}
};

// labeling
class UnknownClass : public Error {
  public:
    explicit UnknownClass(const std::string &msg) : Error(msg) {}
};
class NoImages : public Error {
  public:
    explicit NoImages(const std::string &msg) : Error(msg) {}
};
class RatioOutOfRange : public Error {
  public:
    explicit RatioOutOfRange(const std::string &msg) : Error(msg) {}
};
class ProbabilityOutOfRange : public Error {
  public:
    explicit ProbabilityOutOfRange(const std::string &msg) : Error(msg) {}
};

// sync
class NonDivisorRate : public Error {
  public:
    explicit NonDivisorRate(const std::string &msg) : Error(msg) {}
};
class OutOfTrackRange : public Error {
  public:
    explicit OutOfTrackRange(const std::string &msg) : Error(msg) {}
};

// split / eval
class EmptyInput : public Error {
  public:
    explicit EmptyInput(const std::string &msg) : Error(msg) {}
};
class DegenerateLabels : public Error {
  public:
    explicit DegenerateLabels(const std::string &msg) : Error(msg) {}
};

/// Malformed or inconsistent input files, configs, or CLI data.
class DataError : public Error {
  public:
    explicit DataError(const std::string &msg) : Error(msg) {}
};

} // namespace reefscale
