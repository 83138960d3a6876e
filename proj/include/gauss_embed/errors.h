#ifndef GAUSS_EMBED_ERRORS_H_
#define GAUSS_EMBED_ERRORS_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gauss_embed {

// Base of every error this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Input data is malformed or inconsistent (bad file contents, empty
// vocabulary, degenerate evaluation set, unknown token id ...).
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid parameters or option combinations supplied by the caller.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Vector dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Structured parse failure. `location` is a 1-based line number for text
// inputs and a byte offset for binary inputs.
class ParseError : public DataError {
 public:
  enum class Kind { kVersion, kTruncated, kSyntax, kInvariant };

  ParseError(Kind kind, std::string source, std::uint64_t location,
             bool is_byte_offset, const std::string& what)
      : DataError(source + (is_byte_offset ? " @byte " : ":") +
                  std::to_string(location) + ": " + what),
        kind_(kind),
        source_(std::move(source)),
        location_(location),
        is_byte_offset_(is_byte_offset) {}

  Kind kind() const { return kind_; }
  const std::string& source() const { return source_; }
  std::uint64_t location() const { return location_; }
  bool is_byte_offset() const { return is_byte_offset_; }

 private:
  Kind kind_;
  std::string source_;
  std::uint64_t location_;
  bool is_byte_offset_;
};

}  // namespace gauss_embed

#endif  // GAUSS_EMBED_ERRORS_H_
