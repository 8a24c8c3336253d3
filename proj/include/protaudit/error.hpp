#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace protaudit {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data or configuration that violates a documented contract.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A file that does not parse under its declared format. `line` is 1-based,
// 0 when the failure is not tied to a line.
class ParseError : public ValidationError {
 public:
  ParseError(std::string file, std::size_t line, const std::string& what)
      : ValidationError(Format(file, line, what)), file_(std::move(file)), line_(line) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  static std::string Format(const std::string& file, std::size_t line, const std::string& what) {
    std::string out = file;
    if (line > 0) out += ":" + std::to_string(line);
    return out + ": " + what;
  }

  std::string file_;
  std::size_t line_ = 0;
};

class EmptyCorpusError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DuplicateIdError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A coreference or inference backend could not serve a request.
class BackendError : public Error {
 public:
  BackendError(const std::string& what, std::string story_id = {}, bool retriable = true)
      : Error(what), story_id_(std::move(story_id)), retriable_(retriable) {}

  const std::string& story_id() const { return story_id_; }
  bool retriable() const { return retriable_; }

 private:
  std::string story_id_;
  bool retriable_ = true;
};

class NoProtagonistError : public Error {
 public:
  using Error::Error;
};

// Mentions of different clusters overlap in the same sentence.
class AnnotationConflictError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UndefinedCosineError : public Error {
 public:
  using Error::Error;
};

// No word of a lexicon is present in the embedding store.
class LexiconUnusableError : public Error {
 public:
  using Error::Error;
};

class DegenerateAxisError : public Error {
 public:
  using Error::Error;
};

class ConstantScoreError : public Error {
 public:
  using Error::Error;
};

// A train/test split that leaves a class without training examples.
class SplitError : public Error {
 public:
  using Error::Error;
};

// A pipeline stage was invoked before the stage that produces its input.
class StageOrderError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace protaudit
