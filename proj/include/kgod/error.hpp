#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgod {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidIri : public Error {
 public:
  explicit InvalidIri(const std::string& value) : Error("invalid IRI: " + value) {}
};

class EmptyTitle : public Error {
 public:
  EmptyTitle() : Error("empty page title") {}
};

class ForeignIri : public Error {
 public:
  explicit ForeignIri(const std::string& iri)
      : Error("IRI outside the resource namespace: " + iri), iri_(iri) {}
  const std::string& iri() const { return iri_; }

 private:
  std::string iri_;
};

// Malformed N-Triples or Turtle input. Lines are 1-based.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace kgod
