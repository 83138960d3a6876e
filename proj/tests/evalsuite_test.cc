#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gauss_embed/errors.h"
#include "gauss_embed/evalsuite.h"

namespace gauss_embed {
namespace {

// Brute-force oracles.

std::vector<double> oracle_ranks(const std::vector<double>& xs) {
  std::vector<double> r(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double less = 0, equal = 0;
    for (double x : xs) {
      less += x < xs[i];
      equal += x == xs[i];
    }
    r[i] = 1 + less + (equal - 1) / 2;
  }
  return r;
}

double oracle_pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

double oracle_spearman(const std::vector<double>& a, const std::vector<double>& b) {
  return oracle_pearson(oracle_ranks(a), oracle_ranks(b));
}

// Predict positive when score >= s, for every observed s, plus "none".
double oracle_best_f1(const std::vector<ScoredLabel>& items) {
  double best = 0.0;
  for (const auto& cut : items) {
    double tp = 0, fp = 0, fn = 0;
    for (const auto& it : items) {
      const bool predicted = it.score >= cut.score;
      tp += predicted && it.positive;
      fp += predicted && !it.positive;
      fn += !predicted && it.positive;
    }
    if (tp > 0) best = std::max(best, 2 * tp / (2 * tp + fp + fn));
  }
  return best;
}

double oracle_ap(const std::vector<ScoredLabel>& items) {
  double sum = 0, positives = 0;
  for (const auto& p : items) {
    if (!p.positive) continue;
    ++positives;
    double at_or_above = 0, pos_at_or_above = 0;
    for (const auto& it : items) {
      if (it.score >= p.score) {
        ++at_or_above;
        pos_at_or_above += it.positive;
      }
    }
    sum += pos_at_or_above / at_or_above;
  }
  return sum / positives;
}

TEST(SpearmanTest, Examples) {
  const std::vector<double> a{1, 2, 3}, b{3, 2, 1};
  EXPECT_DOUBLE_EQ(spearman(a, a), 1.0);
  EXPECT_DOUBLE_EQ(spearman(a, b), -1.0);
}

TEST(SpearmanTest, TiesMatchBruteForce) {
  const std::vector<double> x{1, 2, 2, 3, 5, 5, 5, 8}, y{2, 1, 4, 4, 3, 7, 7, 9};
  EXPECT_NEAR(spearman(x, y), oracle_spearman(x, y), 1e-12);
  EXPECT_EQ(average_ranks(x), oracle_ranks(x));
}

TEST(SpearmanTest, RandomSmallCasesMatchBruteForce) {
  Rng rng(40);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(19);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng.below(6));
      y[i] = static_cast<double>(rng.below(6));
    }
    const auto ox = oracle_ranks(x), oy = oracle_ranks(y);
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; }) ||
        std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; })) {
      EXPECT_THROW(spearman(x, y), DataError);
      continue;
    }
    EXPECT_NEAR(spearman(x, y), oracle_spearman(x, y), 1e-12);
  }
}

TEST(SpearmanTest, InvariantUnderMonotoneTransform) {
  Rng rng(41);
  std::vector<double> x(30), y(30), fx(30);
  for (std::size_t i = 0; i < 30; ++i) {
    x[i] = rng.normal();
    y[i] = x[i] + rng.normal();
    fx[i] = std::exp(3 * x[i]) - 7;
  }
  EXPECT_DOUBLE_EQ(spearman(x, y), spearman(fx, y));
}

TEST(SpearmanTest, Errors) {
  const std::vector<double> one{1}, two{1, 2}, flat{4, 4}, three{1, 2, 3};
  EXPECT_THROW(spearman(one, one), DataError);
  EXPECT_THROW(spearman(two, flat), DataError);
  EXPECT_THROW(spearman(two, three), DataError);
}

TEST(EntailmentMetricTest, PerfectSeparation) {
  const std::vector<ScoredLabel> items{{0.9, true}, {0.8, true}, {0.1, false}, {-1.0, false}};
  const auto [f1, thr] = best_f1(items);
  EXPECT_DOUBLE_EQ(f1, 1.0);
  EXPECT_DOUBLE_EQ(thr, 0.45);
  EXPECT_DOUBLE_EQ(average_precision(items), 1.0);
}

TEST(EntailmentMetricTest, ConstantScoresGivePrevalence) {
  Rng rng(42);
  std::vector<ScoredLabel> items;
  int positives = 0;
  for (int i = 0; i < 20; ++i) {
    const bool pos = rng.bernoulli(0.3) || i == 0;
    positives += pos;
    items.push_back({-2.5, pos});
  }
  EXPECT_DOUBLE_EQ(average_precision(items), positives / 20.0);
}

TEST(EntailmentMetricTest, RandomCasesMatchExhaustiveThresholds) {
  Rng rng(43);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ScoredLabel> items(1 + rng.below(20));
    for (auto& it : items) {
      it.score = static_cast<double>(rng.below(7)) - 3.0;
      it.positive = rng.bernoulli(0.4);
    }
    items[0].positive = true;
    EXPECT_DOUBLE_EQ(best_f1(items).first, oracle_best_f1(items));
    EXPECT_DOUBLE_EQ(average_precision(items), oracle_ap(items));
    // The threshold reproduces the best F1.
    const double thr = best_f1(items).second;
    double tp = 0, fp = 0, fn = 0;
    for (const auto& it : items) {
      const bool predicted = it.score > thr;
      tp += predicted && it.positive;
      fp += predicted && !it.positive;
      fn += !predicted && it.positive;
    }
    EXPECT_DOUBLE_EQ(2 * tp / (2 * tp + fp + fn), best_f1(items).first);
  }
}

TEST(EntailmentMetricTest, AddingCorrectlyOrderedPairNeverLowersF1) {
  Rng rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ScoredLabel> items(10);
    for (auto& it : items) it = {rng.normal(), rng.bernoulli(0.5)};
    items[0].positive = true;
    const double before = best_f1(items).first;
    double top = -INFINITY;
    for (const auto& it : items) top = std::max(top, it.score);
    items.push_back({top + 1.0, true});
    EXPECT_GE(best_f1(items).first, before);
  }
}

// --- model-level evaluation ---------------------------------------------

struct TinyModel {
  Vocabulary vocab = Vocabulary::from_entries({{"cat", 5}, {"dog", 4}, {"car", 3}, {"animal", 2}, {"bus", 1}});
  EmbeddingMatrix params{5, 2};

  TinyModel() {
    const double means[5][2] = {{1.0, 0.1}, {1.0, 0.3}, {0.1, 1.0}, {1.0, 0.2}, {0.2, 1.0}};
    const double sigmas[5] = {0.5, 0.6, 0.5, 1.5, 0.7};
    for (WordId w = 0; w < 5; ++w) {
      params.mean(w)[0] = means[w][0];
      params.mean(w)[1] = means[w][1];
      params.sigma(w) = sigmas[w];
    }
  }
};

TEST(EvalSimilarityTest, MatchingOrderingGivesOne) {
  TinyModel m;
  const SimilarityDataset ds{{"cat", "dog", 9.0}, {"cat", "car", 1.0}, {"dog", "bus", 2.0}, {"car", "bus", 8.0}};
  std::vector<double> model, human;
  for (const auto& it : ds) {
    model.push_back(cosine_similarity(m.params.mean(*m.vocab.find(it.word1)), m.params.mean(*m.vocab.find(it.word2))));
    human.push_back(it.score);
  }
  const auto r = eval_similarity(m.params, m.vocab, ds);
  EXPECT_NEAR(r.rho, 100.0 * oracle_spearman(model, human), 1e-9);
  EXPECT_EQ(r.covered, 4u);
  EXPECT_EQ(r.skipped, 0u);
}

TEST(EvalSimilarityTest, CoverageAccounting) {
  TinyModel m;
  const SimilarityDataset ds{{"cat", "dog", 9.0}, {"cat", "zebra", 1.0}, {"car", "bus", 8.0}, {"car", "cat", 0.5}};
  const auto r = eval_similarity(m.params, m.vocab, ds);
  EXPECT_EQ(r.covered + r.skipped, ds.size());
  EXPECT_EQ(r.skipped, 1u);
  EXPECT_GE(r.rho, -100.0);
  EXPECT_LE(r.rho, 100.0);

  const SimilarityDataset oov{{"x", "y", 1.0}, {"cat", "q", 2.0}};
  EXPECT_THROW(eval_similarity(m.params, m.vocab, oov), DataError);
}

TEST(EvalEntailmentTest, ScoresAreNegativeKlAndAsymmetric) {
  TinyModel m;
  const EntailmentDataset ds{{"cat", "animal", true}, {"dog", "animal", true}, {"animal", "cat", false},
                             {"car", "animal", false}, {"cat", "bus", false}, {"ufo", "cat", true}};
  std::vector<ScoredLabel> oracle_items;
  for (const auto& it : ds) {
    const auto a = m.vocab.find(it.word1), b = m.vocab.find(it.word2);
    if (a && b) oracle_items.push_back({-kl_spherical(m.params.word(*a), m.params.word(*b)), it.entails});
  }
  const auto r = eval_entailment(m.params, m.vocab, ds);
  EXPECT_EQ(r.covered, 5u);
  EXPECT_EQ(r.skipped, 1u);
  EXPECT_DOUBLE_EQ(r.best_f1, 100.0 * oracle_best_f1(oracle_items));
  EXPECT_DOUBLE_EQ(r.best_ap, 100.0 * oracle_ap(oracle_items));
  EXPECT_NE(oracle_items[0].score, oracle_items[2].score);

  const EntailmentDataset only_pos{{"cat", "animal", true}};
  EXPECT_THROW(eval_entailment(m.params, m.vocab, only_pos), DataError);
}

TEST(NearestTest, MatchesFullSortAndExcludesQuery) {
  TinyModel m;
  for (Metric metric : {Metric::kCosine, Metric::kW2, Metric::kKl}) {
    const auto got = nearest(m.params, m.vocab, "cat", 4, metric);
    ASSERT_EQ(got.size(), 4u);
    std::vector<std::pair<double, std::string>> all;
    for (WordId w = 1; w < 5; ++w) {
      const auto q = m.params.word(0), o = m.params.word(w);
      const double s = metric == Metric::kCosine ? cosine_similarity(q.mean, o.mean)
                       : metric == Metric::kW2   ? w2_spherical(q, o)
                                                 : kl_spherical(q, o);
      all.emplace_back(metric == Metric::kCosine ? -s : s, m.vocab.word(w));
    }
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_EQ(got[i].word, all[i].second);
      EXPECT_NE(got[i].word, "cat");
    }
  }
}

TEST(NearestTest, DuplicateRow) {
  TinyModel m;
  for (std::size_t i = 0; i < 2; ++i) m.params.mean(4)[i] = m.params.mean(2)[i];
  m.params.sigma(4) = m.params.sigma(2);
  const auto c = nearest(m.params, m.vocab, "car", 1, Metric::kCosine);
  EXPECT_EQ(c[0].word, "bus");
  EXPECT_DOUBLE_EQ(c[0].score, 1.0);
  const auto w = nearest(m.params, m.vocab, "car", 1, Metric::kW2);
  EXPECT_EQ(w[0].word, "bus");
  EXPECT_EQ(w[0].score, 0.0);
}

TEST(NearestTest, Errors) {
  TinyModel m;
  EXPECT_THROW(nearest(m.params, m.vocab, "zebra", 3, Metric::kCosine), DataError);
  EXPECT_THROW(nearest(m.params, m.vocab, "cat", 0, Metric::kCosine), ConfigError);
  EXPECT_EQ(nearest(m.params, m.vocab, "cat", 50, Metric::kW2).size(), 4u);
}

TEST(DatasetReaderTest, SimilarityFormat) {
  std::istringstream in("# header\nTiger\tCat\t7.35\n\ncomputer keyboard 7.62\n");
  const auto ds = read_similarity_dataset(in);
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds[0].word1, "tiger");
  EXPECT_EQ(ds[0].word2, "cat");
  EXPECT_DOUBLE_EQ(ds[0].score, 7.35);
  EXPECT_EQ(ds[1].word2, "keyboard");
}

TEST(DatasetReaderTest, SimilarityErrors) {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return read_similarity_dataset(in);
  };
  EXPECT_THROW(parse("a\tb\n"), ParseError);
  EXPECT_THROW(parse("a\tb\tnope\n"), ParseError);
  EXPECT_THROW(parse("a\tb\tnan\n"), ParseError);
}

TEST(DatasetReaderTest, RepeatedPairsKeepFirst) {
  std::istringstream in("a\tb\t1\nB\tA\t2\nc\td\t3\na\tb\t4\n");
  std::size_t duplicates = 0;
  const auto ds = read_similarity_dataset(in, "<test>", &duplicates);
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_DOUBLE_EQ(ds[0].score, 1.0);
  EXPECT_EQ(duplicates, 2u);
}

TEST(DatasetReaderTest, EntailmentLabels) {
  std::istringstream in("cat\tanimal\t1\nanimal\tcat\t0\n");
  const auto ds = read_entailment_dataset(in);
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_TRUE(ds[0].entails);
  EXPECT_FALSE(ds[1].entails);
  std::istringstream bad("cat\tanimal\t0.5\n");
  EXPECT_THROW(read_entailment_dataset(bad), ParseError);
}

}  // namespace
}  // namespace gauss_embed
