#pragma once

#include <stdexcept>
#include <string>

namespace fdtdbench {

/// Base of every error raised by the library.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// A configuration violates a structural invariant (extent, step count, source placement...).
class ConfigError : public Error
{
  public:
    using Error::Error;
};

/// The Courant number exceeds the explicit-scheme stability bound for the grid dimensionality.
class UnstableCourant : public ConfigError
{
  public:
    UnstableCourant(double given, double bound);

    double given() const noexcept { return given_; }
    double bound() const noexcept { return bound_; }

  private:
    double given_;
    double bound_;
};

/// Allocation or worker-pool start-up failed.
class ResourceError : public Error
{
  public:
    using Error::Error;
};

class SingularMatrix : public Error
{
  public:
    explicit SingularMatrix(std::size_t column);

    std::size_t column() const noexcept { return column_; }

  private:
    std::size_t column_;
};

class InsufficientSamples : public Error
{
  public:
    using Error::Error;
};

class NonPositiveInput : public Error
{
  public:
    using Error::Error;
};

class MismatchedPair : public Error
{
  public:
    using Error::Error;
};

class IoError : public Error
{
  public:
    IoError(const std::string& path, const std::string& what);

    const std::string& path() const noexcept { return path_; }

  private:
    std::string path_;
};

} // namespace fdtdbench
