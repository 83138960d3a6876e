#include "gauss_embed/evalsuite.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <set>

#include "gauss_embed/errors.h"
#include "gauss_embed/geometry.h"

namespace gauss_embed {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

struct RawRow {
  std::string word1, word2;
  std::string_view value;
  std::uint64_t line_no;
};

// Calls `emit(row)` for every data line, splitting on tabs (falling back to
// whitespace when no tab is present).
template <typename Emit>
void read_rows(std::istream& in, const std::string& source, Emit emit) {
  using K = ParseError::Kind;
  std::string line;
  std::uint64_t line_no = 0;
  std::vector<std::string_view> fields;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    fields.clear();
    if (line.find('\t') != std::string::npos) {
      std::string_view rest(line);
      while (true) {
        const auto tab = rest.find('\t');
        fields.push_back(rest.substr(0, tab));
        if (tab == std::string_view::npos) break;
        rest.remove_prefix(tab + 1);
      }
    } else {
      split_tokens(line, fields);
    }
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() || fields[2].empty()) {
      throw ParseError(K::kSyntax, source, line_no, false, "expected word1<TAB>word2<TAB>value");
    }
    emit(RawRow{lowercase(fields[0]), lowercase(fields[1]), fields[2], line_no});
  }
  if (in.bad()) throw IoError("error while reading " + source);
}

double parse_double(std::string_view s, const std::string& source, std::uint64_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError(ParseError::Kind::kSyntax, source, line_no, false,
                     "bad value '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

SimilarityDataset read_similarity_dataset(std::istream& in, const std::string& source,
                                          std::size_t* duplicates) {
  SimilarityDataset out;
  std::size_t dropped = 0;
  std::set<std::pair<std::string, std::string>> seen;
  read_rows(in, source, [&](RawRow row) {
    const double v = parse_double(row.value, source, row.line_no);
    auto key = std::minmax(row.word1, row.word2);
    if (!seen.emplace(key.first, key.second).second) {
      ++dropped;
      return;
    }
    out.push_back({std::move(row.word1), std::move(row.word2), v});
  });
  if (duplicates) *duplicates = dropped;
  return out;
}

SimilarityDataset load_similarity_dataset(const std::filesystem::path& path, std::size_t* duplicates) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_similarity_dataset(in, path.string(), duplicates);
}

EntailmentDataset read_entailment_dataset(std::istream& in, const std::string& source) {
  EntailmentDataset out;
  read_rows(in, source, [&](RawRow row) {
    if (row.value != "1" && row.value != "0") {
      throw ParseError(ParseError::Kind::kSyntax, source, row.line_no, false,
                       "entailment label must be 1 or 0");
    }
    out.push_back({std::move(row.word1), std::move(row.word2), row.value == "1"});
  });
  return out;
}

EntailmentDataset load_entailment_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_entailment_dataset(in, path.string());
}

std::vector<double> average_ranks(std::span<const double> xs) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DataError("spearman: lists differ in length");
  if (xs.size() < 2) throw DataError("spearman: need at least two items");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mx;
    const double dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) throw DataError("spearman: zero rank variance (constant input)");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

SimilarityResult eval_similarity(const EmbeddingMatrix& params, const Vocabulary& vocab,
                                 const SimilarityDataset& dataset) {
  if (dataset.empty()) throw DataError("empty similarity dataset");
  SimilarityResult result;
  std::vector<double> model, human;
  for (const auto& item : dataset) {
    const auto a = vocab.find(item.word1);
    const auto b = vocab.find(item.word2);
    if (!a || !b) {
      ++result.skipped;
      continue;
    }
    model.push_back(cosine_similarity(params.mean(*a), params.mean(*b)));
    human.push_back(item.score);
    ++result.covered;
  }
  if (result.covered < 2) {
    throw DataError("insufficient coverage: " + std::to_string(result.covered) + " of " +
                    std::to_string(dataset.size()) + " pairs in vocabulary");
  }
  result.rho = 100.0 * spearman(model, human);
  return result;
}

std::pair<double, double> best_f1(std::span<const ScoredLabel> items) {
  std::vector<ScoredLabel> sorted(items.begin(), items.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.score > b.score; });
  const auto total_pos = static_cast<std::size_t>(
      std::count_if(sorted.begin(), sorted.end(), [](const auto& s) { return s.positive; }));

  // Threshold +inf: nothing predicted positive.
  double best = 0.0;
  double best_threshold = std::numeric_limits<double>::infinity();
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].score == sorted[i].score) {
      sorted[j].positive ? ++tp : ++fp;
      ++j;
    }
    // Everything in sorted[0, j) is predicted positive.
    const double threshold = j < sorted.size() ? 0.5 * (sorted[i].score + sorted[j].score)
                                               : -std::numeric_limits<double>::infinity();
    const std::size_t fn = total_pos - tp;
    const double denom = static_cast<double>(2 * tp + fp + fn);
    const double f1 = denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
    if (f1 > best) {
      best = f1;
      best_threshold = threshold;
    }
    i = j;
  }
  return {best, best_threshold};
}

double average_precision(std::span<const ScoredLabel> items) {
  std::vector<ScoredLabel> sorted(items.begin(), items.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.score > b.score; });
  const auto total_pos = static_cast<std::size_t>(
      std::count_if(sorted.begin(), sorted.end(), [](const auto& s) { return s.positive; }));
  if (total_pos == 0) return 0.0;
  double ap = 0.0;
  std::size_t tp = 0, seen = 0, i = 0;
  while (i < sorted.size()) {
    std::size_t j = i, block_pos = 0;
    while (j < sorted.size() && sorted[j].score == sorted[i].score) {
      if (sorted[j].positive) ++block_pos;
      ++j;
    }
    tp += block_pos;
    seen = j;
    ap += static_cast<double>(block_pos) * static_cast<double>(tp) / static_cast<double>(seen);
    i = j;
  }
  return ap / static_cast<double>(total_pos);
}

EntailmentResult eval_entailment(const EmbeddingMatrix& params, const Vocabulary& vocab,
                                 const EntailmentDataset& dataset) {
  EntailmentResult result;
  std::vector<ScoredLabel> scored;
  for (const auto& item : dataset) {
    const auto a = vocab.find(item.word1);
    const auto b = vocab.find(item.word2);
    if (!a || !b) {
      ++result.skipped;
      continue;
    }
    scored.push_back({-kl_spherical(params.word(*a), params.word(*b)), item.entails});
    ++result.covered;
  }
  const bool has_pos = std::any_of(scored.begin(), scored.end(), [](const auto& s) { return s.positive; });
  const bool has_neg = std::any_of(scored.begin(), scored.end(), [](const auto& s) { return !s.positive; });
  if (!has_pos || !has_neg) {
    throw DataError("degenerate entailment dataset: need covered positive and negative pairs");
  }
  const auto [f1, threshold] = best_f1(scored);
  result.best_f1 = 100.0 * f1;
  result.best_ap = 100.0 * average_precision(scored);
  result.threshold = threshold;
  return result;
}

std::vector<Neighbor> nearest(const EmbeddingMatrix& params, const Vocabulary& vocab,
                              const std::string& query, std::size_t n, Metric metric) {
  if (n == 0) throw ConfigError("n must be >= 1");
  const auto q = vocab.find(query);
  if (!q) throw DataError("word '" + query + "' is not in the vocabulary");
  const std::size_t rows = std::min(vocab.size(), params.rows());

  std::vector<std::pair<double, WordId>> scored;
  scored.reserve(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto id = static_cast<WordId>(i);
    if (id == *q) continue;
    double s = 0.0;
    switch (metric) {
      case Metric::kCosine:
        s = cosine_similarity(params.mean(*q), params.mean(id));
        break;
      case Metric::kW2:
        s = w2_spherical(params.word(*q), params.word(id));
        break;
      case Metric::kKl:
        s = kl_spherical(params.word(*q), params.word(id));
        break;
    }
    scored.emplace_back(s, id);
  }
  const bool descending = metric == Metric::kCosine;
  const std::size_t take = std::min(n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(),
                    [descending](const auto& a, const auto& b) {
                      if (a.first != b.first) return descending ? a.first > b.first : a.first < b.first;
                      return a.second < b.second;
                    });
  std::vector<Neighbor> out;
  for (std::size_t i = 0; i < take; ++i) out.push_back({vocab.word(scored[i].second), scored[i].first});
  return out;
}

}  // namespace gauss_embed
