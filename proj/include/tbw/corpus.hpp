#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tbw {

struct ReviewRecord {
  std::string title;
  std::string abstract;
  std::string review;
  std::optional<int> rating;  // 1..10 when present

  bool operator==(const ReviewRecord&) const = default;
};

/// One JSON object per line with keys title, abstract, review, rating.
/// Blank lines are skipped; errors carry the 1-based line number.
std::vector<ReviewRecord> parse_corpus(std::string_view text);
std::vector<ReviewRecord> load_corpus(const std::filesystem::path& path);

inline constexpr std::string_view kDefaultPromptTemplate = "Please write a detailed review.";

// Generation prompt: template, then title and abstract on their own lines.
std::string review_prompt(const ReviewRecord& record,
                          std::string_view prompt_template = kDefaultPromptTemplate);
// The paired-submission text used for topic recovery at detection time.
std::string submission_text(const ReviewRecord& record);

}  // namespace tbw
