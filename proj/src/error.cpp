#include "tbw/error.hpp"

namespace tbw {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::io: return "io";
    case ErrorCode::malformed_header: return "malformed_header";
    case ErrorCode::malformed_record: return "malformed_record";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::duplicate_token: return "duplicate_token";
    case ErrorCode::zero_vector: return "zero_vector";
    case ErrorCode::no_embeddable_tokens: return "no_embeddable_tokens";
    case ErrorCode::empty_vocabulary: return "empty_vocabulary";
    case ErrorCode::too_few_topics: return "too_few_topics";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::index_out_of_range: return "index_out_of_range";
    case ErrorCode::unknown_token: return "unknown_token";
    case ErrorCode::version_mismatch: return "version_mismatch";
    case ErrorCode::checksum_mismatch: return "checksum_mismatch";
    case ErrorCode::insufficient_tokens: return "insufficient_tokens";
    case ErrorCode::topic_resolution: return "topic_resolution";
    case ErrorCode::empty_corpus: return "empty_corpus";
    case ErrorCode::runtime: return "runtime";
  }
  return "unknown";
}

ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::runtime:
      return ErrorCategory::runtime;
    default:
      return ErrorCategory::input_validation;
  }
}

}  // namespace tbw
