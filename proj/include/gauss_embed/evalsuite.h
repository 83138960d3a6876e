#ifndef GAUSS_EMBED_EVALSUITE_H_
#define GAUSS_EMBED_EVALSUITE_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gauss_embed/trainer.h"
#include "gauss_embed/vocabulary.h"

namespace gauss_embed {

struct SimilarityItem {
  std::string word1;
  std::string word2;
  double score = 0.0;
};

struct EntailmentItem {
  std::string word1;
  std::string word2;
  bool entails = false;
};

using SimilarityDataset = std::vector<SimilarityItem>;
using EntailmentDataset = std::vector<EntailmentItem>;

// `word1<TAB>word2<TAB>value` lines; '#' lines and blank lines ignored; words
// lowercased. A repeated unordered pair in a similarity dataset keeps its
// first occurrence; later ones are dropped and counted in *duplicates.
// Non-finite scores are rejected; entailment values must be 1 or 0. Errors
// are ParseErrors naming the offending line.
SimilarityDataset read_similarity_dataset(std::istream& in, const std::string& source = "<stream>",
                                          std::size_t* duplicates = nullptr);
SimilarityDataset load_similarity_dataset(const std::filesystem::path& path, std::size_t* duplicates = nullptr);
EntailmentDataset read_entailment_dataset(std::istream& in, const std::string& source = "<stream>");
EntailmentDataset load_entailment_dataset(const std::filesystem::path& path);

// Average ranks (1-based), ties share the mean rank.
std::vector<double> average_ranks(std::span<const double> xs);

// Pearson correlation of average ranks. Throws DataError for mismatched
// lengths, fewer than two items or a constant input.
double spearman(std::span<const double> xs, std::span<const double> ys);

struct SimilarityResult {
  double rho = 0.0;  // x100
  std::size_t covered = 0;
  std::size_t skipped = 0;
};

// Cosine of means per pair against human scores. OOV pairs are skipped.
SimilarityResult eval_similarity(const EmbeddingMatrix& params, const Vocabulary& vocab,
                                 const SimilarityDataset& dataset);

struct EntailmentResult {
  double best_f1 = 0.0;  // x100
  double best_ap = 0.0;  // x100
  double threshold = 0.0;
  std::size_t covered = 0;
  std::size_t skipped = 0;
};

struct ScoredLabel {
  double score;
  bool positive;
};

// Best F1 over every threshold placed between consecutive distinct scores
// (plus +-inf); a pair is predicted positive when score > threshold.
// Returns {f1 in [0,1], threshold}.
std::pair<double, double> best_f1(std::span<const ScoredLabel> items);

// Average precision of the descending-score ranking, in [0,1]. Tied scores
// form one block whose precision is taken at the block's end, so a constant
// scorer gets AP equal to the positive prevalence.
double average_precision(std::span<const ScoredLabel> items);

// Scores pairs by -KL(w1 || w2) and reports best F1 and AP.
EntailmentResult eval_entailment(const EmbeddingMatrix& params, const Vocabulary& vocab,
                                 const EntailmentDataset& dataset);

enum class Metric { kCosine, kW2, kKl };

struct Neighbor {
  std::string word;
  double score;
};

// Top-n words by cosine of means (descending) or W2 / KL(query || other)
// (ascending), excluding the query. Ties keep vocabulary order.
std::vector<Neighbor> nearest(const EmbeddingMatrix& params, const Vocabulary& vocab,
                              const std::string& query, std::size_t n, Metric metric);

}  // namespace gauss_embed

#endif  // GAUSS_EMBED_EVALSUITE_H_
