#include "gauss_embed/pairs.h"

#include <algorithm>
#include <fstream>

#include "gauss_embed/errors.h"

namespace gauss_embed {

namespace {

std::unique_ptr<std::istream> open_corpus(const std::filesystem::path& path) {
  auto in = std::make_unique<std::ifstream>(path);
  if (!*in) throw IoError("cannot open corpus " + path.string());
  return in;
}

}  // namespace

void append_window_pairs(std::span<const WordId> sentence, int window, bool dynamic_window,
                         Rng& rng, std::vector<TrainingPair>& out) {
  if (window < 1) throw ConfigError("window must be >= 1");
  const auto n = static_cast<std::ptrdiff_t>(sentence.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t span =
        dynamic_window ? 1 + static_cast<std::ptrdiff_t>(rng.below(static_cast<std::size_t>(window)))
                       : window;
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - span);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + span);
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      if (j != i) out.push_back({sentence[i], sentence[j]});
    }
  }
}

PairStream::PairStream(const std::filesystem::path& corpus_path, const Vocabulary& vocab,
                       const SamplingTables& tables, PairOptions options, std::uint64_t seed)
    : PairStream(open_corpus(corpus_path), vocab, tables, options, seed) {}

PairStream::PairStream(std::unique_ptr<std::istream> corpus, const Vocabulary& vocab,
                       const SamplingTables& tables, PairOptions options, std::uint64_t seed)
    : in_(std::move(corpus)), vocab_(vocab), tables_(tables), options_(options), rng_(seed) {
  if (options_.window < 1) throw ConfigError("window must be >= 1");
  if (tables_.discard_prob.size() != vocab_.size()) {
    throw ConfigError("sampling tables do not match the vocabulary");
  }
  if (options_.shuffle_buffer == 0) options_.shuffle_buffer = 1;
}

bool PairStream::read_sentence() {
  if (!std::getline(*in_, line_)) {
    if (in_->bad()) throw IoError("error while reading corpus");
    return false;
  }
  split_tokens(line_, tokens_);
  sentence_.clear();
  for (auto tok : tokens_) {
    ++tokens_read_;
    const auto id = vocab_.find(tok);
    if (!id || vocab_.count(*id) == 0) continue;
    if (options_.subsample && !tables_.keep(*id, rng_)) continue;
    sentence_.push_back(*id);
  }
  tokens_kept_ += sentence_.size();
  return true;
}

bool PairStream::next_block(std::vector<TrainingPair>& block) {
  block.clear();
  while (block.size() < options_.shuffle_buffer && read_sentence()) {
    append_window_pairs(sentence_, options_.window, options_.dynamic_window, rng_, block);
  }
  rng_.shuffle(block.begin(), block.end());
  return !block.empty();
}

std::vector<TrainingPair> generate_pairs(const std::filesystem::path& corpus_path,
                                         const Vocabulary& vocab, const SamplingTables& tables,
                                         PairOptions options, std::uint64_t seed) {
  PairStream stream(corpus_path, vocab, tables, options, seed);
  std::vector<TrainingPair> all, block;
  while (stream.next_block(block)) all.insert(all.end(), block.begin(), block.end());
  return all;
}

std::uint64_t count_pairs(const std::filesystem::path& corpus_path, const Vocabulary& vocab,
                          const SamplingTables& tables, PairOptions options, std::uint64_t seed) {
  std::ifstream in(corpus_path);
  if (!in) throw IoError("cannot open corpus " + corpus_path.string());
  Rng rng(seed);
  std::string line;
  std::vector<std::string_view> tokens;
  std::uint64_t total = 0;
  const auto w = static_cast<std::uint64_t>(options.window);
  while (std::getline(in, line)) {
    split_tokens(line, tokens);
    std::uint64_t n = 0;
    for (auto tok : tokens) {
      const auto id = vocab.find(tok);
      if (!id || vocab.count(*id) == 0) continue;
      if (options.subsample && !tables.keep(*id, rng)) continue;
      ++n;
    }
    // Fixed window: sum_i min(w, i) + min(w, n-1-i) = 2 * sum_i min(w, i).
    // For dynamic windows this is an upper bound; the schedule clamps at lr_min.
    for (std::uint64_t i = 0; i < n; ++i) total += 2 * std::min(w, i);
  }
  return total;
}

}  // namespace gauss_embed
