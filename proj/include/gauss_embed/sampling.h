#ifndef GAUSS_EMBED_SAMPLING_H_
#define GAUSS_EMBED_SAMPLING_H_

#include <cstddef>
#include <span>
#include <vector>

#include "gauss_embed/rng.h"
#include "gauss_embed/vocabulary.h"

namespace gauss_embed {

// Probability of discarding a token of relative frequency `frequency` under
// sub-sampling threshold `t`: max(0, 1 - sqrt(t / frequency)).
// Throws DomainError unless both arguments are positive.
double discard_probability(double frequency, double t);

// Noise distribution U(w)^(3/4) / Z, materialised as a table of word ids
// with largest-remainder apportionment. Every word with a nonzero count gets
// at least one slot. Throws ConfigError if table_size < number of counted
// words, DataError if the vocabulary has no counted word.
std::vector<WordId> build_negative_table(const Vocabulary& vocab, std::size_t table_size);

struct SamplingTables {
  // Per-word discard probability P(w), in [0, 1).
  std::vector<double> discard_prob;
  std::vector<WordId> negative_table;

  bool keep(WordId w, Rng& rng) const {
    const double p = discard_prob[static_cast<std::size_t>(w)];
    return p <= 0.0 || rng.uniform() >= p;
  }

  WordId draw_negative(Rng& rng) const { return negative_table[rng.below(negative_table.size())]; }

  // Fills `out` with draws, redrawing any id equal to `avoid_a` or `avoid_b`
  // up to kMaxRedraws times before accepting it.
  void draw_negatives(WordId avoid_a, WordId avoid_b, Rng& rng, std::span<WordId> out) const;

  static constexpr int kMaxRedraws = 8;
};

inline constexpr std::size_t kDefaultNegativeTableSize = 10'000'000;

// `subsample_t <= 0` disables sub-sampling (all discard probabilities 0).
SamplingTables build_sampling_tables(const Vocabulary& vocab, double subsample_t,
                                     std::size_t table_size = kDefaultNegativeTableSize);

}  // namespace gauss_embed

#endif  // GAUSS_EMBED_SAMPLING_H_
