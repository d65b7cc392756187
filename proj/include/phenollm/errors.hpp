#pragma once

#include <stdexcept>
#include <string>

namespace phenollm {

// Base for every error thrown by the library. Catch this to hand an
// operational failure back to the CLI as exit code 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// ----- dataset / schema -----

class MissingColumn : public Error {
 public:
  explicit MissingColumn(const std::string& column)
      : Error("missing column: " + column), column_(column) {}
  const std::string& column() const { return column_; }

 private:
  std::string column_;
};

class MalformedDate : public Error {
 public:
  explicit MalformedDate(const std::string& text)
      : Error("malformed date: '" + text + "'") {}
};

class MalformedRow : public Error {
 public:
  explicit MalformedRow(const std::string& detail)
      : Error("malformed row: " + detail) {}
};

class InvalidWindow : public Error {
 public:
  explicit InvalidWindow(const std::string& detail)
      : Error("invalid window: " + detail) {}
};

class OutOfRange : public Error {
 public:
  explicit OutOfRange(const std::string& detail)
      : Error("out of range: " + detail) {}
};

class EmptyDataset : public Error {
 public:
  explicit EmptyDataset(const std::string& detail)
      : Error("empty dataset: " + detail) {}
};

class InsufficientClass : public Error {
 public:
  InsufficientClass(int year, const std::string& label, std::size_t available,
                    std::size_t needed)
      : Error("study year " + std::to_string(year) + ": " +
              std::to_string(available) + " " + label +
              " samples available, " + std::to_string(needed) + " needed"),
        year_(year),
        available_(available),
        needed_(needed) {}
  int year() const { return year_; }
  std::size_t available() const { return available_; }
  std::size_t needed() const { return needed_; }

 private:
  int year_;
  std::size_t available_;
  std::size_t needed_;
};

class InvalidSpec : public Error {
 public:
  explicit InvalidSpec(const std::string& detail)
      : Error("invalid generator spec: " + detail) {}
};

// ----- table formats -----

// Tabular rows drop missing fields entirely, so a short row cannot be
// realigned with the schema. Callers that need missingness must pick
// another format.
class AmbiguousTabular : public Error {
 public:
  explicit AmbiguousTabular(const std::string& detail)
      : Error("ambiguous tabular row: " + detail) {}
};

// ----- gateway -----

class AuthFailure : public Error {
 public:
  explicit AuthFailure(const std::string& detail)
      : Error("authentication failure: " + detail) {}
};

class Timeout : public Error {
 public:
  explicit Timeout(const std::string& detail) : Error("timeout: " + detail) {}
};

class ExhaustedRetries : public Error {
 public:
  ExhaustedRetries(const std::string& detail, int attempts)
      : Error("retries exhausted after " + std::to_string(attempts) +
              " attempts: " + detail),
        attempts_(attempts) {}
  int attempts() const { return attempts_; }

 private:
  int attempts_ = 0;
};

// ----- baseline -----

class EmptyTrainingSet : public Error {
 public:
  EmptyTrainingSet() : Error("training set is empty") {}
};

class BorderlineSamplePresent : public Error {
 public:
  explicit BorderlineSamplePresent(const std::string& detail)
      : Error("borderline sample in training set: " + detail) {}
};

// ----- harness -----

class EmptyRecords : public Error {
 public:
  explicit EmptyRecords(const std::string& detail)
      : Error("no records: " + detail) {}
};

class InsufficientQualifying : public Error {
 public:
  InsufficientQualifying(const std::string& label, std::size_t available,
                         std::size_t needed)
      : Error("curation needs " + std::to_string(needed) + " " + label +
              " examples, only " + std::to_string(available) + " qualify"),
        available_(available),
        needed_(needed) {}
  std::size_t available() const { return available_; }
  std::size_t needed() const { return needed_; }

 private:
  std::size_t available_;
  std::size_t needed_;
};

class IoFailure : public Error {
 public:
  explicit IoFailure(const std::string& detail)
      : Error("i/o failure: " + detail) {}
};

}  // namespace phenollm
