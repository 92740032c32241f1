#include "tbw/generate.hpp"

#include <algorithm>

#include "tbw/error.hpp"
#include "tbw/logits.hpp"
#include "tbw/random.hpp"
#include "tbw/tokenizer.hpp"

namespace tbw {

std::vector<std::size_t> green_indices(const GreenListPartition& partition, std::size_t topic,
                                       const Vocabulary& vocab) {
  std::vector<std::size_t> out;
  for (const auto& token : partition.list(topic)) {
    if (auto idx = vocab.index_of(token)) out.push_back(*idx);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::size_t initial_context(const ToyLM& lm, const TokenSequence& prompt) {
  for (auto it = prompt.tokens.rbegin(); it != prompt.tokens.rend(); ++it) {
    if (auto idx = lm.vocab().index_of(*it)) return *idx;
  }
  return lm.start_index();
}

TopicDecision resolve_topic(const TbwScheme& tbw, std::string_view prompt) {
  try {
    return identify_topic(prompt, *tbw.table, *tbw.topics, tbw.top_k);
  } catch (const Error& e) {
    throw Error(ErrorCode::topic_resolution,
                std::string("cannot resolve a topic from the prompt: ") + e.what());
  }
}

}  // namespace

GenerationResult generate(const ToyLM& lm, std::string_view prompt, const Scheme& scheme,
                          const GenerationOptions& options) {
  if (options.length == 0) {
    throw Error(ErrorCode::invalid_argument, "generation length must be >= 1");
  }
  const TokenSequence prompt_tokens = tokenize(prompt);

  GenerationResult result;
  result.sequence.source = TokenSource::generated;
  result.sequence.tokens.reserve(options.length);

  std::vector<std::size_t> tbw_green;
  double tbw_delta = 0.0;
  const KgwParams* kgw = nullptr;

  if (const auto* tbw = std::get_if<TbwScheme>(&scheme)) {
    if (!tbw->partition || !tbw->topics || !tbw->table) {
      throw Error(ErrorCode::invalid_argument, "tbw scheme is missing partition, topics or table");
    }
    tbw->params.validate();
    result.topic = resolve_topic(*tbw, prompt);
    tbw_green = green_indices(*tbw->partition, result.topic->topic_index, lm.vocab());
    tbw_delta = tbw->params.delta;
  } else if (const auto* k = std::get_if<KgwScheme>(&scheme)) {
    k->params.validate();
    kgw = &k->params;
  }

  Rng rng(options.seed);
  std::size_t context = initial_context(lm, prompt_tokens);
  for (std::size_t step = 0; step < options.length; ++step) {
    LogitVector logits = lm.next_logits(context);
    if (!tbw_green.empty()) {
      apply_bias(logits, tbw_green, tbw_delta);
    } else if (kgw) {
      apply_bias(logits, kgw_green(context, *kgw, lm.vocab_size()), kgw->delta);
    }
    const auto probs = softmax(logits, options.temperature);
    const std::size_t next = sample_index(probs, rng);
    result.sequence.tokens.push_back(lm.vocab().token(next));
    context = next;
  }
  return result;
}

}  // namespace tbw
