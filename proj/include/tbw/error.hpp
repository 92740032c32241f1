#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tbw {

enum class ErrorCode {
  io,
  malformed_header,
  malformed_record,
  dimension_mismatch,
  duplicate_token,
  zero_vector,
  no_embeddable_tokens,
  empty_vocabulary,
  too_few_topics,
  invalid_argument,
  index_out_of_range,
  unknown_token,
  version_mismatch,
  checksum_mismatch,
  insufficient_tokens,
  topic_resolution,
  empty_corpus,
  runtime,
};

// Coarse grouping used for process exit codes.
enum class ErrorCategory { input_validation, runtime };

std::string_view to_string(ErrorCode code);
ErrorCategory category_of(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace tbw
