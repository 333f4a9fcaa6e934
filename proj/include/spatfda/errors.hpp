#ifndef SPATFDA_ERRORS_HPP
#define SPATFDA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spatfda {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class NotPositiveDefinite : public Error {
public:
  explicit NotPositiveDefinite(const std::string& msg) : Error(msg) {}
};

class ConvergenceFailure : public Error {
public:
  explicit ConvergenceFailure(const std::string& msg) : Error(msg) {}
};

class DomainError : public Error {
public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

class GridMismatch : public Error {
public:
  explicit GridMismatch(const std::string& msg) : Error(msg) {}
};

class InvalidK : public Error {
public:
  explicit InvalidK(const std::string& msg) : Error(msg) {}
};

class LengthMismatch : public Error {
public:
  explicit LengthMismatch(const std::string& msg) : Error(msg) {}
};

class TooFewPairs : public Error {
public:
  explicit TooFewPairs(const std::string& msg) : Error(msg) {}
};

class AllFitsFailed : public Error {
public:
  explicit AllFitsFailed(const std::string& msg) : Error(msg) {}
};

class LocationMismatch : public Error {
public:
  explicit LocationMismatch(const std::string& msg) : Error(msg) {}
};

class NonPsd : public Error {
public:
  explicit NonPsd(const std::string& msg) : Error(msg) {}
};

class NonPositiveScale : public Error {
public:
  explicit NonPositiveScale(const std::string& msg) : Error(msg) {}
};

class FileFormat : public Error {
public:
  explicit FileFormat(const std::string& msg) : Error(msg) {}
};

class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace spatfda

#endif
