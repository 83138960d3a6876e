#ifndef GAUSS_EMBED_PAIRS_H_
#define GAUSS_EMBED_PAIRS_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gauss_embed/rng.h"
#include "gauss_embed/sampling.h"
#include "gauss_embed/vocabulary.h"

namespace gauss_embed {

struct TrainingPair {
  WordId center;
  WordId context;

  friend bool operator==(const TrainingPair&, const TrainingPair&) = default;
  friend auto operator<=>(const TrainingPair&, const TrainingPair&) = default;
};

struct PairOptions {
  int window = 5;
  // Shrink the window to a uniform draw in [1, window] per center token.
  bool dynamic_window = false;
  bool subsample = true;
  std::size_t shuffle_buffer = std::size_t{1} << 20;
};

// Emits (w_i, w_j) for every j != i with |i - j| <= window over an already
// sub-sampled sentence. `rng` is only consulted for dynamic windows.
void append_window_pairs(std::span<const WordId> sentence, int window, bool dynamic_window,
                         Rng& rng, std::vector<TrainingPair>& out);

// Streams (center, context) pairs from a line-oriented corpus.
//
// Each line is a sentence; windows never cross lines. Tokens missing from the
// vocabulary (or reserved zero-count rows) are dropped, then every remaining
// occurrence survives sub-sampling with probability 1 - P(w), then windows
// slide over the compacted sentence. Pairs are buffered and shuffled in blocks
// of at least `shuffle_buffer` pairs. Output is a pure function of the input
// text, the tables, the options and the seed.
class PairStream {
 public:
  PairStream(const std::filesystem::path& corpus_path, const Vocabulary& vocab,
             const SamplingTables& tables, PairOptions options, std::uint64_t seed);
  PairStream(std::unique_ptr<std::istream> corpus, const Vocabulary& vocab,
             const SamplingTables& tables, PairOptions options, std::uint64_t seed);

  // Replaces `block` with the next shuffled block. Returns false (and leaves
  // `block` empty) once the corpus is exhausted.
  bool next_block(std::vector<TrainingPair>& block);

  std::uint64_t tokens_read() const { return tokens_read_; }
  std::uint64_t tokens_kept() const { return tokens_kept_; }

 private:
  bool read_sentence();

  std::unique_ptr<std::istream> in_;
  const Vocabulary& vocab_;
  const SamplingTables& tables_;
  PairOptions options_;
  Rng rng_;
  std::string line_;
  std::vector<std::string_view> tokens_;
  std::vector<WordId> sentence_;
  std::uint64_t tokens_read_ = 0;
  std::uint64_t tokens_kept_ = 0;
};

// Whole-corpus convenience wrapper over PairStream (concatenated blocks).
std::vector<TrainingPair> generate_pairs(const std::filesystem::path& corpus_path,
                                         const Vocabulary& vocab, const SamplingTables& tables,
                                         PairOptions options, std::uint64_t seed);

// Number of pairs one pass would produce for `seed`, without materialising
// them. Used to size the learning-rate schedule.
std::uint64_t count_pairs(const std::filesystem::path& corpus_path, const Vocabulary& vocab,
                          const SamplingTables& tables, PairOptions options, std::uint64_t seed);

}  // namespace gauss_embed

#endif  // GAUSS_EMBED_PAIRS_H_
