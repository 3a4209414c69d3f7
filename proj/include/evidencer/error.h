#ifndef EVIDENCER_ERROR_H_
#define EVIDENCER_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace evidencer {

// Error categories. The CLI maps each category to a distinct exit status.
enum class ErrorCode {
  kInvalidArgument,
  kParse,            // malformed input text (corpus line, DSL, CSV, ...)
  kIo,
  kVersionMismatch,  // index file magic or version not recognized
  kTruncated,        // index file shorter than its header claims
  kChecksum,         // index file CRC mismatch or trailing garbage
  kProtocol,         // external scorer broke the wire protocol
  kTimeout,
  kConfig,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// A parse error that knows where it happened. `line` is 1-based (0 when the
// input is a single string) and `column` is a 1-based character position.
class ParseError : public Error {
 public:
  ParseError(const std::string &message, size_t line, size_t column = 0);

  size_t line() const { return line_; }
  size_t column() const { return column_; }

 private:
  size_t line_;
  size_t column_;
};

}  // namespace evidencer

#endif  // EVIDENCER_ERROR_H_
