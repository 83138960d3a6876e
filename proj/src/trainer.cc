#include "gauss_embed/trainer.h"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <mutex>
#include <thread>

#include "gauss_embed/errors.h"
#include "gauss_embed/pairs.h"
#include "gauss_embed/rng.h"

namespace gauss_embed {

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(dim >= 1, "dim must be >= 1");
  require(epochs >= 0, "epochs must be >= 0");
  require(window >= 1, "window must be >= 1");
  require(negatives >= 1, "negatives must be >= 1");
  require(learning_rate > 0.0, "learning-rate must be > 0");
  require(lr_min >= 0.0 && lr_min < learning_rate, "lr-min must be in [0, learning-rate)");
  require(subsample >= 0.0, "subsample must be >= 0");
  require(alpha >= 0.0 && std::isfinite(alpha), "alpha must be finite and >= 0");
  require(min_count >= 1, "min-count must be >= 1");
  require(sigma_min > 0.0 && sigma_min <= sigma_max, "need 0 < sigma-min <= sigma-max");
  require(sigma_init >= sigma_min && sigma_init <= sigma_max,
          "sigma-init must lie in [sigma-min, sigma-max]");
  require(!max_norm || *max_norm > 0.0, "max-norm must be > 0");
  require(std::isfinite(fixed_bias_value), "fixed-bias-value must be finite");
  require(threads >= 1, "threads must be >= 1");
  require(shuffle_buffer >= 1, "shuffle-buffer must be >= 1");
  require(grad_floor > 0.0, "grad-floor must be > 0");
}

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dim)
    : dim_(dim), means_(rows * dim, 0.0), sigmas_(rows, 1.0) {}

bool bitwise_equal(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
  auto same = [](const std::vector<double>& x, const std::vector<double>& y) {
    return x.size() == y.size() &&
           (x.empty() || std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0);
  };
  return a.dim() == b.dim() && same(a.means(), b.means()) && same(a.sigmas(), b.sigmas()) &&
         std::memcmp(&a.bias1, &b.bias1, sizeof(double)) == 0 &&
         std::memcmp(&a.bias2, &b.bias2, sizeof(double)) == 0;
}

double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

void check_id(const EmbeddingMatrix& params, WordId id) {
  if (id < 0 || static_cast<std::size_t>(id) >= params.rows()) {
    throw DataError("token id " + std::to_string(id) + " outside the embedding table (" +
                    std::to_string(params.rows()) + " rows)");
  }
}

void check_sample(const LossSample& s, const EmbeddingMatrix& params) {
  check_id(params, s.center);
  check_id(params, s.context);
  for (WordId n : s.negatives) check_id(params, n);
  if (s.relation) {
    check_id(params, s.relation->target);
    for (WordId n : s.relation->negatives) check_id(params, n);
  }
}

const RelationTerm& require_relation(const LossSample& s) {
  if (!s.relation) throw ConfigError("sample has no relation term");
  if (!is_valid_relation(s.relation->tag)) {
    throw ConfigError("unknown relation tag " + std::to_string(static_cast<int>(s.relation->tag)));
  }
  return *s.relation;
}

bool uses_kl(Relation tag, EiMode mode) { return mode == EiMode::kIsA && tag == Relation::kIsA; }

EnergyTerms relation_energy(const EmbeddingMatrix& p, WordId w, const RelationTerm& rel,
                            WordId other, EiMode mode, const EnergyOptions& energy) {
  return uses_kl(rel.tag, mode) ? energy_terms_kl(p.word(w), p.word(other), p.bias2)
                                : energy_terms_w2(p.word(w), p.word(other), p.bias2, energy);
}

double context_half(const LossSample& s, const EmbeddingMatrix& p, const EnergyOptions& energy) {
  double loss = log_sigmoid(energy_terms_w2(p.word(s.center), p.word(s.context), p.bias1, energy).energy);
  for (WordId n : s.negatives) {
    loss += log_sigmoid(-energy_terms_w2(p.word(s.center), p.word(n), p.bias1, energy).energy);
  }
  return loss;
}

// Accumulates dL/dtheta into a SparseGradient, merging repeated rows.
class GradientBuilder {
 public:
  GradientBuilder(const EmbeddingMatrix& params, SparseGradient& out)
      : params_(params), out_(out), dim_(params.dim()) {
    out_.rows.clear();
    out_.d_means.clear();
    out_.d_sigmas.clear();
    out_.d_bias1 = 0.0;
    out_.d_bias2 = 0.0;
    out_.loss = 0.0;
  }

  // One energy term E(u, v) entering the loss with weight dL/dE = `g`.
  void add(WordId u, WordId v, const EnergyTerms& t, double g, double& d_bias) {
    const std::size_t su = slot(u);
    const std::size_t sv = slot(v);
    const auto mu = params_.mean(u);
    const auto mv = params_.mean(v);
    double* gu = out_.d_means.data() + su * dim_;
    double* gv = out_.d_means.data() + sv * dim_;
    const double c = g * t.mean_coef;
    for (std::size_t i = 0; i < dim_; ++i) {
      const double step = c * (mu[i] - mv[i]);
      gu[i] += step;
      gv[i] -= step;
    }
    out_.d_sigmas[su] += g * t.d_sigma_w;
    out_.d_sigmas[sv] += g * t.d_sigma_c;
    d_bias += g;
  }

 private:
  std::size_t slot(WordId id) {
    for (std::size_t i = 0; i < out_.rows.size(); ++i) {
      if (out_.rows[i] == id) return i;
    }
    out_.rows.push_back(id);
    out_.d_means.resize(out_.d_means.size() + dim_, 0.0);
    out_.d_sigmas.push_back(0.0);
    return out_.rows.size() - 1;
  }

  const EmbeddingMatrix& params_;
  SparseGradient& out_;
  std::size_t dim_;
};

}  // namespace

double wdg_loss(const LossSample& sample, const EmbeddingMatrix& params,
                const EnergyOptions& energy) {
  check_sample(sample, params);
  return context_half(sample, params, energy);
}

double relation_loss(const LossSample& sample, const EmbeddingMatrix& params, EiMode mode,
                     const EnergyOptions& energy) {
  const auto& rel = require_relation(sample);
  check_sample(sample, params);
  double loss = log_sigmoid(relation_energy(params, sample.center, rel, rel.target, mode, energy).energy);
  for (WordId m : rel.negatives) {
    loss += log_sigmoid(-relation_energy(params, sample.center, rel, m, mode, energy).energy);
  }
  return loss;
}

double wdg_ei_loss(const LossSample& sample, const EmbeddingMatrix& params, double alpha,
                   EiMode mode, const EnergyOptions& energy) {
  return wdg_loss(sample, params, energy) + alpha * relation_loss(sample, params, mode, energy);
}

double objective_loss(const LossSample& sample, const EmbeddingMatrix& params,
                      const Objective& objective) {
  if (objective.use_relations) {
    return wdg_ei_loss(sample, params, objective.alpha, objective.ei_mode, objective.energy);
  }
  return wdg_loss(sample, params, objective.energy);
}

bool SparseGradient::all_finite() const {
  auto finite = [](double x) { return std::isfinite(x); };
  return std::isfinite(loss) && std::isfinite(d_bias1) && std::isfinite(d_bias2) &&
         std::all_of(d_means.begin(), d_means.end(), finite) &&
         std::all_of(d_sigmas.begin(), d_sigmas.end(), finite);
}

void loss_gradient(const LossSample& sample, const EmbeddingMatrix& params,
                   const Objective& objective, SparseGradient& out) {
  check_sample(sample, params);
  GradientBuilder grad(params, out);
  const WordId w = sample.center;

  // log s(E) has derivative s(-E); log s(-E) has derivative -s(E).
  auto positive = [&](WordId v, const EnergyTerms& t, double weight, double& d_bias) {
    out.loss += weight * log_sigmoid(t.energy);
    grad.add(w, v, t, weight * sigmoid(-t.energy), d_bias);
  };
  auto negative = [&](WordId v, const EnergyTerms& t, double weight, double& d_bias) {
    out.loss += weight * log_sigmoid(-t.energy);
    grad.add(w, v, t, -weight * sigmoid(t.energy), d_bias);
  };

  const auto& energy = objective.energy;
  positive(sample.context, energy_terms_w2(params.word(w), params.word(sample.context), params.bias1, energy),
           1.0, out.d_bias1);
  for (WordId n : sample.negatives) {
    negative(n, energy_terms_w2(params.word(w), params.word(n), params.bias1, energy), 1.0, out.d_bias1);
  }

  if (!objective.use_relations) return;
  const auto& rel = require_relation(sample);
  const double alpha = objective.alpha;
  positive(rel.target, relation_energy(params, w, rel, rel.target, objective.ei_mode, energy), alpha,
           out.d_bias2);
  for (WordId m : rel.negatives) {
    negative(m, relation_energy(params, w, rel, m, objective.ei_mode, energy), alpha, out.d_bias2);
  }
}

StepResult sgd_step(const LossSample& sample, EmbeddingMatrix& params, double lr,
                    const Objective& objective, const StepConstraints& constraints,
                    SparseGradient& workspace) {
  if (!(lr >= 0.0)) throw ConfigError("learning rate must be >= 0");
  loss_gradient(sample, params, objective, workspace);
  if (!workspace.all_finite()) return {false, workspace.loss};

  const std::size_t dim = params.dim();
  for (std::size_t slot = 0; slot < workspace.rows.size(); ++slot) {
    const WordId row = workspace.rows[slot];
    auto mean = params.mean(row);
    const double* g = workspace.d_means.data() + slot * dim;
    for (std::size_t i = 0; i < dim; ++i) mean[i] += lr * g[i];

    double& s = params.sigma(row);
    s += lr * workspace.d_sigmas[slot];
    s = std::clamp(s, constraints.sigma_min, constraints.sigma_max);

    if (constraints.max_norm) {
      double norm2 = 0.0;
      for (double x : mean) norm2 += x * x;
      const double limit = *constraints.max_norm;
      if (norm2 > limit * limit) {
        const double scale = limit / std::sqrt(norm2);
        for (double& x : mean) x *= scale;
      }
    }
  }
  if (constraints.learn_biases) {
    params.bias1 += lr * workspace.d_bias1;
    params.bias2 += lr * workspace.d_bias2;
  }
  return {true, workspace.loss};
}

EmbeddingMatrix init_params(std::size_t rows, const TrainConfig& config, std::uint64_t seed) {
  if (rows == 0) throw ConfigError("cannot initialise an empty embedding table");
  if (config.dim < 1) throw ConfigError("dim must be >= 1");
  const auto dim = static_cast<std::size_t>(config.dim);
  EmbeddingMatrix p(rows, dim);
  Rng rng(seed);
  const double half = 0.5 / static_cast<double>(dim);
  for (double& x : p.means()) x = rng.uniform(-half, half);
  std::fill(p.sigmas().begin(), p.sigmas().end(), config.sigma_init);
  const double b = config.bias_mode == BiasMode::kLearned ? 1.0 : config.fixed_bias_value;
  p.bias1 = b;
  p.bias2 = b;
  return p;
}

EmbeddingMatrix init_params(const Vocabulary& vocab, const TrainConfig& config, std::uint64_t seed) {
  return init_params(vocab.size(), config, seed);
}

std::string EpochStats::to_log() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "epoch=%d pairs=%" PRIu64 " mean_loss=%.6f lr=%.6g skipped=%" PRIu64
                " sigma_mean=%.6g sigma_min=%.6g sigma_max=%.6g",
                epoch, pairs, mean_loss, lr, skipped, sigma_mean, sigma_min, sigma_max);
  return buf;
}

namespace {

struct WorkerTotals {
  std::uint64_t pairs = 0;
  std::uint64_t skipped = 0;
  double loss_sum = 0.0;
};

}  // namespace

TrainReport train(const std::filesystem::path& corpus, const Vocabulary& vocab,
                  const SamplingTables& tables, const RelationStore* relations,
                  const TrainConfig& config, EmbeddingMatrix& params,
                  const EpochCallback& on_epoch) {
  config.validate();
  if (params.dim() != static_cast<std::size_t>(config.dim)) {
    throw ConfigError("embedding dimension does not match config.dim");
  }
  if (params.rows() < vocab.size()) throw DataError("embedding table smaller than the vocabulary");
  if (tables.discard_prob.size() != vocab.size()) {
    throw ConfigError("sampling tables do not match the vocabulary");
  }
  if (relations) {
    const WordId sentinel = relations->sentinel_id();
    if (sentinel < 0 || static_cast<std::size_t>(sentinel) >= params.rows()) {
      throw ConfigError("relation sentinel row " + std::to_string(sentinel) +
                        " is missing from the embedding table");
    }
  }

  TrainReport report;
  if (config.epochs == 0) return report;

  const Objective objective{config.energy_options(), config.alpha, config.ei_mode, relations != nullptr};
  const StepConstraints constraints{config.sigma_min, config.sigma_max, config.max_norm,
                                    config.bias_mode == BiasMode::kLearned};
  const PairOptions pair_options{config.window, config.dynamic_window, config.subsample > 0.0,
                                 config.shuffle_buffer};

  const std::uint64_t per_epoch =
      count_pairs(corpus, vocab, tables, pair_options, mix_seed(config.seed, 0x5c4edu));
  report.scheduled_pairs = std::max<std::uint64_t>(1, per_epoch * static_cast<std::uint64_t>(config.epochs));
  const double lr0 = config.learning_rate;
  const double lr_span = config.learning_rate - config.lr_min;
  const double scheduled = static_cast<double>(report.scheduled_pairs);
  auto lr_at = [&](std::uint64_t processed) {
    const double progress = std::min(1.0, static_cast<double>(processed) / scheduled);
    return std::max(config.lr_min, lr0 - lr_span * progress);
  };

  std::atomic<std::uint64_t> processed{0};
  const auto k = static_cast<std::size_t>(config.negatives);
  const auto n_vocab = static_cast<WordId>(vocab.size());

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    PairStream stream(corpus, vocab, tables, pair_options, mix_seed(config.seed, 2 * epoch + 1));
    std::mutex stream_mutex;
    std::vector<WorkerTotals> totals(static_cast<std::size_t>(config.threads));
    std::vector<std::exception_ptr> errors(totals.size());

    auto worker = [&](std::size_t id) {
      try {
        Rng rng(mix_seed(config.seed, 1'000'003ULL * (static_cast<std::uint64_t>(epoch) + 1) + id));
        SparseGradient workspace;
        LossSample sample;
        sample.negatives.resize(k);
        std::vector<TrainingPair> block;
        WorkerTotals& mine = totals[id];
        while (true) {
          {
            std::unique_lock lock(stream_mutex, std::defer_lock);
            if (config.threads > 1) lock.lock();
            if (!stream.next_block(block)) break;
          }
          for (const TrainingPair& pair : block) {
            if (pair.center < 0 || pair.center >= n_vocab || pair.context < 0 || pair.context >= n_vocab) {
              throw DataError("pair references unknown token id");
            }
            const double lr = lr_at(processed.fetch_add(1, std::memory_order_relaxed));
            sample.center = pair.center;
            sample.context = pair.context;
            tables.draw_negatives(pair.center, pair.context, rng, sample.negatives);
            if (relations) {
              const RelationEntry e = sample_target(*relations, pair.center, config.ei_mode, rng);
              if (!sample.relation) sample.relation.emplace();
              sample.relation->tag = e.tag;
              sample.relation->target = e.target;
              sample.relation->negatives.resize(k);
              tables.draw_negatives(pair.center, e.target, rng, sample.relation->negatives);
            }
            const StepResult r = sgd_step(sample, params, lr, objective, constraints, workspace);
            ++mine.pairs;
            if (r.applied) {
              mine.loss_sum += r.loss;
            } else {
              ++mine.skipped;
            }
          }
        }
      } catch (...) {
        errors[id] = std::current_exception();
      }
    };

    if (config.threads == 1) {
      worker(0);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t t = 0; t < totals.size(); ++t) pool.emplace_back(worker, t);
      for (auto& th : pool) th.join();
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }

    EpochStats stats;
    stats.epoch = epoch + 1;
    double loss_sum = 0.0;
    for (const auto& t : totals) {
      stats.pairs += t.pairs;
      stats.skipped += t.skipped;
      loss_sum += t.loss_sum;
    }
    const std::uint64_t applied = stats.pairs - stats.skipped;
    stats.mean_loss = applied > 0 ? loss_sum / static_cast<double>(applied) : 0.0;
    stats.lr = lr_at(processed.load());
    const auto& sig = params.sigmas();
    stats.sigma_min = *std::min_element(sig.begin(), sig.end());
    stats.sigma_max = *std::max_element(sig.begin(), sig.end());
    double sum = 0.0;
    for (double s : sig) sum += s;
    stats.sigma_mean = sum / static_cast<double>(sig.size());

    report.skipped_total += stats.skipped;
    report.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return report;
}

}  // namespace gauss_embed
