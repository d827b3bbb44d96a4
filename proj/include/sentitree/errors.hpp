#pragma once

#include <stdexcept>
#include <string>

namespace sentitree {

// Error families. The CLI maps DataError -> exit 2, NumericError -> exit 3,
// UsageError -> exit 1.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingColumnError : public DataError {
 public:
  MissingColumnError(const std::string& file, const std::string& column)
      : DataError(file + ": missing column '" + column + "'") {}
};

class DuplicateIdError : public DataError {
 public:
  DuplicateIdError(const std::string& file, const std::string& id, std::size_t line)
      : DataError(file + ":" + std::to_string(line) + ": duplicate id '" + id + "'") {}
};

class MalformedLineError : public DataError {
 public:
  MalformedLineError(const std::string& file, std::size_t line, const std::string& what)
      : DataError(file + ":" + std::to_string(line) + ": " + what) {}
};

class CycleDetectedError : public DataError {
 public:
  explicit CycleDetectedError(const std::string& ids)
      : DataError("retweet links form a cycle: " + ids) {}
};

class MissingBaseLabelError : public DataError {
 public:
  explicit MissingBaseLabelError(const std::string& id)
      : DataError("no base label for node '" + id + "'") {}
};

class MissingProfileError : public DataError {
 public:
  explicit MissingProfileError(const std::string& node)
      : DataError("no profile for tree node '" + node + "'") {}
};

class EmptyVocabularyError : public DataError {
 public:
  EmptyVocabularyError() : DataError("corpus has an empty vocabulary") {}
};

class DegenerateDataError : public DataError {
 public:
  explicit DegenerateDataError(const std::string& what) : DataError(what) {}
};

class EmptyEvalError : public DataError {
 public:
  EmptyEvalError() : DataError("no evaluated samples") {}
};

class WidthMismatchError : public NumericError {
 public:
  WidthMismatchError(std::size_t expected, std::size_t got)
      : NumericError("feature width mismatch: expected " + std::to_string(expected) +
                     ", got " + std::to_string(got)) {}
};

class NonFiniteLossError : public NumericError {
 public:
  explicit NonFiniteLossError(const std::string& where)
      : NumericError("non-finite loss in " + where) {}
};

}  // namespace sentitree
