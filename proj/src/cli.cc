#include "gauss_embed/cli.h"

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include "gauss_embed/errors.h"
#include "gauss_embed/evalsuite.h"
#include "gauss_embed/model_io.h"
#include "gauss_embed/pca.h"
#include "gauss_embed/relations.h"
#include "gauss_embed/sampling.h"
#include "gauss_embed/svg.h"
#include "gauss_embed/trainer.h"
#include "gauss_embed/vocabulary.h"

namespace gauss_embed {

namespace {

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

ModelFormat parse_format(const std::string& s) {
  return s == "binary" ? ModelFormat::kBinary : ModelFormat::kText;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

struct TrainArgs {
  TrainConfig config;
  std::string corpus;
  std::string vocab_path;
  std::string output;
  std::string format = "text";
  std::string bias_mode = "learned";
  double max_norm = 0.0;
  CLI::Option* max_norm_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  // train-ei only
  std::string relations;
  std::string ei_mode = "all";
  std::string whitelist;
};

void add_train_flags(CLI::App* cmd, TrainArgs& a) {
  auto& c = a.config;
  cmd->add_option("--corpus", a.corpus, "Tokenized corpus, one sentence per line")->required();
  cmd->add_option("--output", a.output, "Model output path")->required();
  cmd->add_option("--format", a.format, "Model format")->check(CLI::IsMember({"text", "binary"}));
  cmd->add_option("--vocab", a.vocab_path, "Reuse a vocabulary file instead of counting the corpus")
      ;
  cmd->add_option("--dim", c.dim, "Embedding dimension");
  cmd->add_option("--epochs", c.epochs, "Passes over the corpus");
  cmd->add_option("--window", c.window, "Context window size");
  cmd->add_option("--negatives", c.negatives, "Negative samples per pair");
  cmd->add_option("--learning-rate", c.learning_rate, "Initial learning rate");
  cmd->add_option("--lr-min", c.lr_min, "Final learning rate");
  cmd->add_option("--subsample", c.subsample, "Sub-sampling threshold t (0 disables)");
  cmd->add_option("--alpha", c.alpha, "Weight of the relation loss");
  cmd->add_option("--min-count", c.min_count, "Minimum word count");
  cmd->add_option("--sigma-init", c.sigma_init, "Initial sigma");
  cmd->add_option("--sigma-min", c.sigma_min, "Lower sigma clamp");
  cmd->add_option("--sigma-max", c.sigma_max, "Upper sigma clamp");
  a.max_norm_opt = cmd->add_option("--max-norm", a.max_norm, "Clamp mean norms (off unless given)");
  a.seed_opt = cmd->add_option("--seed", c.seed, "Random seed (GAUSS_EMBED_SEED overrides)");
  cmd->add_option("--bias-mode", a.bias_mode, "learned or fixed")->check(CLI::IsMember({"learned", "fixed"}));
  cmd->add_option("--fixed-bias-value", c.fixed_bias_value, "Bias value in fixed mode");
  cmd->add_flag("--squared-w2-energy", c.squared_w2_energy, "Use -W2^2 + b as the energy");
  cmd->add_flag("--dynamic-window", c.dynamic_window, "Shrink windows randomly per token");
  cmd->add_option("--threads", c.threads, "Worker threads");
  cmd->add_option("--shuffle-buffer", c.shuffle_buffer, "Pairs per shuffled block");
  cmd->add_option("--negative-table-size", c.negative_table_size, "Entries in the noise table");
  cmd->add_option("--grad-floor", c.grad_floor, "Floor for W2 in gradient denominators");
}

void finalize_train_args(TrainArgs& a) {
  a.config.bias_mode = a.bias_mode == "fixed" ? BiasMode::kFixed : BiasMode::kLearned;
  if (a.max_norm_opt->count() > 0) a.config.max_norm = a.max_norm;
  if (const char* env = std::getenv("GAUSS_EMBED_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      a.config.seed = std::stoull(env, &used);
      if (env[used] != '\0') throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError(std::string("GAUSS_EMBED_SEED is not an unsigned integer: ") + env);
    }
  }
  a.config.ei_mode = a.ei_mode == "isa" ? EiMode::kIsA : EiMode::kAll;
  a.config.validate();
}

int run_train(TrainArgs& a, bool with_relations, std::ostream& out) {
  finalize_train_args(a);
  const TrainConfig& config = a.config;

  Vocabulary vocab = a.vocab_path.empty() ? build_vocabulary(a.corpus, config.min_count)
                                          : load_vocabulary(a.vocab_path);
  out << "vocab V=" << vocab.size() << " total_tokens=" << vocab.total_tokens() << '\n';

  std::optional<LoadedRelations> relations;
  if (with_relations) {
    vocab.add_reserved(std::string(kNoRelationToken));
    RelationWhitelist whitelist = default_relation_whitelist();
    if (!a.whitelist.empty()) {
      whitelist.clear();
      for (const auto& name : split_list(a.whitelist)) {
        const auto rel = parse_relation(name);
        if (!rel) throw ConfigError("unknown relation '" + name + "' in --relation-whitelist");
        whitelist.insert(*rel);
      }
    }
    relations = load_relations(a.relations, vocab, whitelist);
    out << relations->report.to_log() << '\n';
  }

  const SamplingTables tables = build_sampling_tables(vocab, config.subsample, config.negative_table_size);
  EmbeddingMatrix params = init_params(vocab, config, config.seed);
  const auto report = train(a.corpus, vocab, tables, relations ? &relations->store : nullptr, config, params,
                            [&out](const EpochStats& s) { out << s.to_log() << '\n' << std::flush; });
  if (report.skipped_total > 0) {
    out << "warning: skipped " << report.skipped_total << " steps with non-finite gradients\n";
  }
  save_model(params, vocab, a.output, parse_format(a.format));
  out << "wrote " << a.output << '\n';
  return kExitOk;
}

Metric parse_metric(const std::string& s) {
  if (s == "w2") return Metric::kW2;
  if (s == "kl") return Metric::kKl;
  return Metric::kCosine;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian word embeddings trained with a Wasserstein-2 energy", "gauss-embed"};
  app.require_subcommand(1);

  // build-vocab
  std::string bv_corpus, bv_output;
  std::uint64_t bv_min_count = 5;
  auto* build_vocab_cmd = app.add_subcommand("build-vocab", "Count a corpus into a vocabulary file");
  build_vocab_cmd->add_option("--corpus", bv_corpus)->required();
  build_vocab_cmd->add_option("--min-count", bv_min_count);
  build_vocab_cmd->add_option("--output", bv_output)->required();

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train Gaussian embeddings on a corpus");
  add_train_flags(train_cmd, train_args);

  TrainArgs ei_args;
  auto* train_ei_cmd = app.add_subcommand("train-ei", "Train with knowledge-graph relations");
  add_train_flags(train_ei_cmd, ei_args);
  train_ei_cmd->add_option("--relations", ei_args.relations, "relation<TAB>word1<TAB>word2 file")
      ->required()
      ;
  train_ei_cmd->add_option("--ei-mode", ei_args.ei_mode, "all: W2 on every relation; isa: KL on IsA only")
      ->check(CLI::IsMember({"all", "isa"}));
  train_ei_cmd->add_option("--relation-whitelist", ei_args.whitelist, "Comma-separated relation names");

  std::string model_path, dataset_path, dataset_name;
  auto* eval_sim_cmd = app.add_subcommand("eval-sim", "Spearman correlation on a word-similarity set");
  eval_sim_cmd->add_option("--model", model_path)->required();
  eval_sim_cmd->add_option("--dataset", dataset_path)->required();
  eval_sim_cmd->add_option("--name", dataset_name, "Dataset name in the report (default: file stem)");

  auto* eval_entail_cmd = app.add_subcommand("eval-entail", "Best F1 / AP on an entailment set");
  eval_entail_cmd->add_option("--model", model_path)->required();
  eval_entail_cmd->add_option("--dataset", dataset_path)->required();

  std::string query, metric = "cosine";
  std::size_t n_neighbors = 10;
  auto* nearest_cmd = app.add_subcommand("nearest", "Nearest neighbours of a word");
  nearest_cmd->add_option("--model", model_path)->required();
  nearest_cmd->add_option("--word", query)->required();
  nearest_cmd->add_option("--n", n_neighbors);
  nearest_cmd->add_option("--metric", metric)->check(CLI::IsMember({"cosine", "w2", "kl"}));

  std::string viz_words, viz_output;
  double viz_extent = 800.0;
  bool pca_global = false;
  auto* viz_cmd = app.add_subcommand("viz", "Draw words as circles on a PCA plane (SVG)");
  viz_cmd->add_option("--model", model_path)->required();
  viz_cmd->add_option("--words", viz_words, "Comma-separated words")->required();
  viz_cmd->add_option("--output", viz_output)->required();
  viz_cmd->add_option("--extent", viz_extent, "Canvas side in pixels");
  viz_cmd->add_flag("--pca-global", pca_global, "Fit PCA on the whole vocabulary");

  std::string export_output, export_format = "text";
  auto* export_cmd = app.add_subcommand("export", "Rewrite a model in another format");
  export_cmd->add_option("--model", model_path)->required();
  export_cmd->add_option("--output", export_output)->required();
  export_cmd->add_option("--format", export_format)->check(CLI::IsMember({"text", "binary"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, eo;
    const int code = app.exit(e, o, eo);
    out << o.str();
    err << eo.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (build_vocab_cmd->parsed()) {
      if (bv_min_count < 1) throw ConfigError("min-count must be >= 1");
      const Vocabulary vocab = build_vocabulary(bv_corpus, bv_min_count);
      save_vocabulary(vocab, bv_output);
      out << "vocab V=" << vocab.size() << " total_tokens=" << vocab.total_tokens() << '\n';
    } else if (train_cmd->parsed()) {
      return run_train(train_args, false, out);
    } else if (train_ei_cmd->parsed()) {
      return run_train(ei_args, true, out);
    } else if (eval_sim_cmd->parsed()) {
      const auto model = load_model(model_path);
      std::size_t duplicates = 0;
      const auto dataset = load_similarity_dataset(dataset_path, &duplicates);
      if (duplicates > 0) err << "note: dropped " << duplicates << " repeated pair(s) from " << dataset_path << '\n';
      const auto r = eval_similarity(model.params, model.vocab, dataset);
      const std::string name =
          dataset_name.empty() ? std::filesystem::path(dataset_path).stem().string() : dataset_name;
      out << "dataset            rho(x100)  covered  skipped\n";
      out << name << std::string(name.size() < 19 ? 19 - name.size() : 1, ' ') << fixed(r.rho, 2) << "      "
          << r.covered << "      " << r.skipped << '\n';
      out << "dataset=" << name << " rho=" << fixed(r.rho) << " covered=" << r.covered << " skipped=" << r.skipped
          << '\n';
    } else if (eval_entail_cmd->parsed()) {
      const auto model = load_model(model_path);
      const auto dataset = load_entailment_dataset(dataset_path);
      const auto r = eval_entailment(model.params, model.vocab, dataset);
      out << "best F1 (x100)  best AP (x100)  threshold  covered  skipped\n";
      out << fixed(r.best_f1, 2) << "           " << fixed(r.best_ap, 2) << "           " << fixed(r.threshold)
          << "  " << r.covered << "  " << r.skipped << '\n';
      out << "entail best_f1=" << fixed(r.best_f1) << " best_ap=" << fixed(r.best_ap)
          << " thr=" << fixed(r.threshold) << '\n';
    } else if (nearest_cmd->parsed()) {
      const auto model = load_model(model_path);
      for (const auto& nb : nearest(model.params, model.vocab, query, n_neighbors, parse_metric(metric))) {
        out << nb.word << '\t' << fixed(nb.score, 6) << '\n';
      }
    } else if (viz_cmd->parsed()) {
      const auto model = load_model(model_path);
      VizSpec spec;
      spec.extent = viz_extent;
      std::vector<std::vector<double>> means;
      for (const auto& w : split_list(viz_words)) {
        const auto id = model.vocab.find(w);
        if (!id) throw DataError("word '" + w + "' is not in the model");
        spec.words.push_back(w);
        spec.sigmas.push_back(model.params.sigma(*id));
        const auto m = model.params.mean(*id);
        means.emplace_back(m.begin(), m.end());
      }
      if (pca_global) {
        std::vector<std::vector<double>> all;
        all.reserve(model.params.rows());
        for (std::size_t i = 0; i < model.params.rows(); ++i) {
          const auto m = model.params.mean(static_cast<WordId>(i));
          all.emplace_back(m.begin(), m.end());
        }
        const Pca2 pca = fit_pca2(all);
        for (const auto& m : means) spec.centers.push_back(pca.project(m));
      } else {
        spec.centers = pca_project(means);
      }
      emit_viz(spec, viz_output);
      out << "wrote " << viz_output << '\n';
    } else if (export_cmd->parsed()) {
      const auto model = load_model(model_path);
      save_model(model.params, model.vocab, export_output, parse_format(export_format));
      out << "wrote " << export_output << '\n';
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace gauss_embed
