/*!
 *  Copyright (c) 2026 by Contributors
 * \file gmask/error.h
 * \brief Exception types and the GMASK_CHECK macro.
 */
#ifndef GMASK_ERROR_H_
#define GMASK_ERROR_H_

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmask {

/*! \brief Base class of every error thrown by the library. */
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/*! \brief Grammar text could not be parsed or failed validation. */
class GrammarError : public Error {
 public:
  GrammarError(const std::string& msg, int line = 0, int column = 0)
      : Error(line > 0 ? std::to_string(line) + ":" + std::to_string(column) + ": " + msg : msg),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/*! \brief The schema uses keywords outside the supported subset, or is malformed. */
class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& msg, std::vector<std::string> unsupported = {})
      : Error(msg), unsupported_(std::move(unsupported)) {}

  const std::vector<std::string>& unsupported_keywords() const { return unsupported_; }

 private:
  std::vector<std::string> unsupported_;
};

/*! \brief A set of parallel stacks grew beyond its configured cap. */
class StateCapError : public Error {
 public:
  explicit StateCapError(const std::string& msg) : Error(msg) {}
};

/*! \brief A bundle was opened with a vocabulary it was not compiled for. */
class VocabMismatchError : public Error {
 public:
  explicit VocabMismatchError(const std::string& msg) : Error(msg) {}
};

namespace detail {

class CheckFailure {
 public:
  CheckFailure(const char* file, int line, const char* cond) {
    stream_ << file << ":" << line << ": check failed: " << cond << " ";
  }
  [[noreturn]] ~CheckFailure() noexcept(false) { throw Error(stream_.str()); }
  std::ostringstream& stream() { return stream_; }

 private:
  std::ostringstream stream_;
};

}  // namespace detail
}  // namespace gmask

#define GMASK_CHECK(cond) \
  if (cond) {             \
  } else                  \
    ::gmask::detail::CheckFailure(__FILE__, __LINE__, #cond).stream()

#endif  // GMASK_ERROR_H_
