#ifndef GAUSS_EMBED_TRAINER_H_
#define GAUSS_EMBED_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gauss_embed/geometry.h"
#include "gauss_embed/relations.h"
#include "gauss_embed/sampling.h"
#include "gauss_embed/vocabulary.h"

namespace gauss_embed {

enum class BiasMode { kLearned, kFixed };

struct TrainConfig {
  int dim = 50;
  int epochs = 5;
  int window = 5;
  int negatives = 5;
  double learning_rate = 0.025;
  double lr_min = 1e-4;
  double subsample = 1e-5;
  double alpha = 1.0;
  std::uint64_t min_count = 5;
  double sigma_init = 1.0;
  double sigma_min = 1e-3;
  double sigma_max = 10.0;
  std::optional<double> max_norm;
  std::uint64_t seed = 1;
  BiasMode bias_mode = BiasMode::kLearned;
  double fixed_bias_value = 1.0;
  bool squared_w2_energy = false;
  bool dynamic_window = false;
  int threads = 1;

  EiMode ei_mode = EiMode::kAll;
  std::size_t shuffle_buffer = std::size_t{1} << 20;
  std::size_t negative_table_size = kDefaultNegativeTableSize;
  double grad_floor = 1e-8;

  // Throws ConfigError on the first violated constraint.
  void validate() const;

  EnergyOptions energy_options() const { return {grad_floor, squared_w2_energy}; }
};

// V x D means, V sigmas and the two global biases.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t rows, std::size_t dim);

  std::size_t rows() const { return sigmas_.size(); }
  std::size_t dim() const { return dim_; }

  std::span<double> mean(WordId w) {
    return {means_.data() + static_cast<std::size_t>(w) * dim_, dim_};
  }
  std::span<const double> mean(WordId w) const {
    return {means_.data() + static_cast<std::size_t>(w) * dim_, dim_};
  }
  double& sigma(WordId w) { return sigmas_[static_cast<std::size_t>(w)]; }
  double sigma(WordId w) const { return sigmas_[static_cast<std::size_t>(w)]; }
  GaussianRef word(WordId w) const { return {mean(w), sigma(w)}; }

  std::vector<double>& means() { return means_; }
  const std::vector<double>& means() const { return means_; }
  std::vector<double>& sigmas() { return sigmas_; }
  const std::vector<double>& sigmas() const { return sigmas_; }

  double bias1 = 1.0;
  double bias2 = 1.0;

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> means_;
  std::vector<double> sigmas_;
};

// Bitwise comparison (distinguishes -0.0 from 0.0 and compares NaN payloads).
bool bitwise_equal(const EmbeddingMatrix& a, const EmbeddingMatrix& b);

struct RelationTerm {
  Relation tag = Relation::kNone;
  WordId target = -1;
  std::vector<WordId> negatives;
};

// One training example: the context term (w, c, n_1..n_k) and optionally the
// relation term (w, e, m_1..m_k).
struct LossSample {
  WordId center = 0;
  WordId context = 0;
  std::vector<WordId> negatives;
  std::optional<RelationTerm> relation;
};

// Everything the objective needs besides the sample and the parameters.
struct Objective {
  EnergyOptions energy;
  double alpha = 1.0;
  EiMode ei_mode = EiMode::kAll;
  // When false the relation term of a sample is ignored.
  bool use_relations = false;
};

// Numerically stable log(sigmoid(x)).
double log_sigmoid(double x);
double sigmoid(double x);

// L = log s(E(w,c)) + sum_i log s(-E(w,n_i)) with E = -W2 + b1.
double wdg_loss(const LossSample& sample, const EmbeddingMatrix& params,
                const EnergyOptions& energy = {});

// The relation half L2(w, e, m): W2 energy with b2, or KL(w || e) with b2 for
// IsA targets when mode is kIsA. Throws ConfigError for an invalid tag or a
// sample without a relation term.
double relation_loss(const LossSample& sample, const EmbeddingMatrix& params, EiMode mode,
                     const EnergyOptions& energy = {});

// L1 + alpha * L2.
double wdg_ei_loss(const LossSample& sample, const EmbeddingMatrix& params, double alpha,
                   EiMode mode, const EnergyOptions& energy = {});

// Loss of `sample` under `objective` (wdg_loss or wdg_ei_loss).
double objective_loss(const LossSample& sample, const EmbeddingMatrix& params,
                      const Objective& objective);

// dL/dparams restricted to the rows a sample touches. Duplicate ids are merged.
struct SparseGradient {
  std::vector<WordId> rows;
  std::vector<double> d_means;  // rows.size() x dim, row-major
  std::vector<double> d_sigmas;
  double d_bias1 = 0.0;
  double d_bias2 = 0.0;
  double loss = 0.0;

  std::span<const double> d_mean(std::size_t slot, std::size_t dim) const {
    return {d_means.data() + slot * dim, dim};
  }
  bool all_finite() const;
};

void loss_gradient(const LossSample& sample, const EmbeddingMatrix& params,
                   const Objective& objective, SparseGradient& out);

// Constraints applied after each update.
struct StepConstraints {
  double sigma_min = 1e-3;
  double sigma_max = 10.0;
  std::optional<double> max_norm;
  bool learn_biases = true;
};

struct StepResult {
  bool applied = false;
  double loss = 0.0;
};

// params += lr * dL/dparams, then clamp sigmas and (optionally) renormalise
// means of touched rows. A non-finite gradient leaves params untouched and
// returns applied = false.
StepResult sgd_step(const LossSample& sample, EmbeddingMatrix& params, double lr,
                    const Objective& objective, const StepConstraints& constraints,
                    SparseGradient& workspace);

// Means ~ U(-0.5/D, 0.5/D), sigmas = sigma_init, biases 1.0 (learned) or
// fixed_bias_value (fixed).
EmbeddingMatrix init_params(std::size_t rows, const TrainConfig& config, std::uint64_t seed);
EmbeddingMatrix init_params(const Vocabulary& vocab, const TrainConfig& config, std::uint64_t seed);

struct EpochStats {
  int epoch = 0;
  std::uint64_t pairs = 0;
  double mean_loss = 0.0;
  double lr = 0.0;
  std::uint64_t skipped = 0;
  double sigma_mean = 0.0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;

  // `epoch=<i> pairs=<n> mean_loss=<f> lr=<f> skipped=<n>` followed by sigma
  // statistics.
  std::string to_log() const;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  std::uint64_t scheduled_pairs = 0;
  std::uint64_t skipped_total = 0;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Runs config.epochs passes of SGD ascent over the corpus. Relations, when
// given, switch the objective to L1 + alpha * L2 with targets drawn per pair.
// Learning rate decays linearly from learning_rate to lr_min over the
// scheduled pair count. With threads == 1 the result is a pure function of
// the inputs and config.seed.
TrainReport train(const std::filesystem::path& corpus, const Vocabulary& vocab,
                  const SamplingTables& tables, const RelationStore* relations,
                  const TrainConfig& config, EmbeddingMatrix& params,
                  const EpochCallback& on_epoch = {});

}  // namespace gauss_embed

#endif  // GAUSS_EMBED_TRAINER_H_
