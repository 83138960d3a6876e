#include "gauss_embed/sampling.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gauss_embed/errors.h"

namespace gauss_embed {

double discard_probability(double frequency, double t) {
  if (!(frequency > 0.0) || !(t > 0.0)) {
    throw DomainError("discard_probability needs frequency > 0 and t > 0");
  }
  return std::max(0.0, 1.0 - std::sqrt(t / frequency));
}

std::vector<WordId> build_negative_table(const Vocabulary& vocab, std::size_t table_size) {
  const std::size_t n = vocab.size();
  std::vector<double> weight(n, 0.0);
  std::size_t counted = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (vocab.counts()[i] > 0) {
      weight[i] = std::pow(static_cast<double>(vocab.counts()[i]), 0.75);
      ++counted;
    }
  }
  if (counted == 0) throw DataError("negative table needs at least one counted word");
  if (table_size < counted) {
    throw ConfigError("negative table size " + std::to_string(table_size) +
                      " is smaller than the vocabulary (" + std::to_string(counted) + ")");
  }

  const double z = std::accumulate(weight.begin(), weight.end(), 0.0);
  std::vector<double> quota(n);
  std::vector<std::size_t> seats(n);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    quota[i] = static_cast<double>(table_size) * weight[i] / z;
    seats[i] = static_cast<std::size_t>(std::floor(quota[i]));
    assigned += seats[i];
  }

  // Largest remainders first; ties go to the lower id.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return quota[a] - static_cast<double>(seats[a]) > quota[b] - static_cast<double>(seats[b]);
  });
  for (std::size_t k = 0; assigned < table_size; ++k, ++assigned) ++seats[order[k % n]];

  // Every counted word gets a slot, taken from the word most over its quota.
  for (std::size_t i = 0; i < n; ++i) {
    if (weight[i] <= 0.0 || seats[i] > 0) continue;
    std::size_t donor = n;
    double best_excess = -INFINITY;
    for (std::size_t j = 0; j < n; ++j) {
      if (seats[j] < 2) continue;
      const double excess = static_cast<double>(seats[j]) - quota[j];
      if (excess > best_excess) {
        best_excess = excess;
        donor = j;
      }
    }
    --seats[donor];
    seats[i] = 1;
  }

  std::vector<WordId> table;
  table.reserve(table_size);
  for (std::size_t i = 0; i < n; ++i) table.insert(table.end(), seats[i], static_cast<WordId>(i));
  return table;
}

void SamplingTables::draw_negatives(WordId avoid_a, WordId avoid_b, Rng& rng,
                                    std::span<WordId> out) const {
  for (auto& slot : out) {
    WordId id = draw_negative(rng);
    for (int attempt = 0; attempt < kMaxRedraws && (id == avoid_a || id == avoid_b); ++attempt) {
      id = draw_negative(rng);
    }
    slot = id;
  }
}

SamplingTables build_sampling_tables(const Vocabulary& vocab, double subsample_t,
                                     std::size_t table_size) {
  SamplingTables tables;
  tables.discard_prob.assign(vocab.size(), 0.0);
  if (subsample_t > 0.0) {
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      if (vocab.counts()[i] == 0) continue;
      tables.discard_prob[i] = discard_probability(vocab.frequency(static_cast<WordId>(i)), subsample_t);
    }
  }
  tables.negative_table = build_negative_table(vocab, table_size);
  return tables;
}

}  // namespace gauss_embed
