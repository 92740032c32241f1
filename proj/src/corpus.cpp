#include "tbw/corpus.hpp"

#include <json.hpp>

#include "tbw/error.hpp"
#include "tbw/text_io.hpp"

namespace tbw {

namespace {

[[noreturn]] void bad_line(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::malformed_record, "corpus line " + std::to_string(line_no) + ": " + what);
}

std::string required_text(const nlohmann::json& j, const char* key, std::size_t line_no) {
  if (!j.contains(key)) bad_line(line_no, std::string("missing '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_string()) bad_line(line_no, std::string("'") + key + "' must be a string");
  auto s = v.get<std::string>();
  if (trim(s).empty()) bad_line(line_no, std::string("'") + key + "' is empty");
  return s;
}

}  // namespace

std::vector<ReviewRecord> parse_corpus(std::string_view text) {
  std::vector<ReviewRecord> records;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (trim(lines[i]).empty()) continue;
    const auto j = nlohmann::json::parse(lines[i], nullptr, false);
    if (j.is_discarded() || !j.is_object()) bad_line(line_no, "not a JSON object");

    ReviewRecord rec;
    rec.title = required_text(j, "title", line_no);
    rec.review = required_text(j, "review", line_no);
    if (j.contains("abstract") && !j.at("abstract").is_null()) {
      if (!j.at("abstract").is_string()) bad_line(line_no, "'abstract' must be a string");
      rec.abstract = j.at("abstract").get<std::string>();
    }
    if (j.contains("rating") && !j.at("rating").is_null()) {
      const auto& r = j.at("rating");
      if (!r.is_number_integer()) bad_line(line_no, "'rating' must be an integer");
      const auto value = r.get<long long>();
      if (value < 1 || value > 10) {
        throw Error(ErrorCode::malformed_record, "corpus line " + std::to_string(line_no) +
                                                     ": rating " + std::to_string(value) +
                                                     " outside [1, 10]");
      }
      rec.rating = static_cast<int>(value);
    }
    records.push_back(std::move(rec));
  }
  if (records.empty()) {
    throw Error(ErrorCode::empty_corpus, "corpus contains no records");
  }
  return records;
}

std::vector<ReviewRecord> load_corpus(const std::filesystem::path& path) {
  try {
    return parse_corpus(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::io) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string review_prompt(const ReviewRecord& record, std::string_view prompt_template) {
  std::string prompt(prompt_template);
  prompt += "\n" + record.title;
  if (!record.abstract.empty()) prompt += "\n" + record.abstract;
  return prompt;
}

std::string submission_text(const ReviewRecord& record) {
  return record.abstract.empty() ? record.title : record.title + "\n" + record.abstract;
}

}  // namespace tbw
