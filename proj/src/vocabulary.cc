#include "gauss_embed/vocabulary.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "gauss_embed/errors.h"

namespace gauss_embed {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

constexpr std::string_view kVocabMagic = "#gauss-embed-vocab";

}  // namespace

void split_tokens(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t i = 0;
  const std::size_t n = line.size();
  while (i < n) {
    while (i < n && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < n && !is_space(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
}

Vocabulary Vocabulary::from_entries(std::vector<std::pair<std::string, std::uint64_t>> entries) {
  Vocabulary v;
  v.words_.reserve(entries.size());
  v.counts_.reserve(entries.size());
  for (auto& [word, count] : entries) {
    const auto id = static_cast<WordId>(v.words_.size());
    if (!v.id_of_.emplace(word, id).second) {
      throw DataError("duplicate vocabulary word '" + word + "'");
    }
    v.total_tokens_ += count;
    v.words_.push_back(std::move(word));
    v.counts_.push_back(count);
  }
  return v;
}

std::optional<WordId> Vocabulary::find(std::string_view word) const {
  // Heterogeneous lookup for unordered_map is C++20 but needs a transparent
  // hasher; a temporary string keeps this simple.
  auto it = id_of_.find(std::string(word));
  if (it == id_of_.end()) return std::nullopt;
  return it->second;
}

double Vocabulary::frequency(WordId id) const {
  if (total_tokens_ == 0) return 0.0;
  return static_cast<double>(count(id)) / static_cast<double>(total_tokens_);
}

WordId Vocabulary::add_reserved(const std::string& word) {
  if (auto id = find(word)) return *id;
  const auto id = static_cast<WordId>(words_.size());
  id_of_.emplace(word, id);
  words_.push_back(word);
  counts_.push_back(0);
  return id;
}

Vocabulary build_vocabulary(std::istream& corpus, std::uint64_t min_count) {
  struct Entry {
    std::uint64_t count = 0;
    std::size_t first_seen = 0;
  };
  std::unordered_map<std::string, Entry> table;
  std::vector<std::string_view> tokens;
  std::string line;
  std::size_t order = 0;
  while (std::getline(corpus, line)) {
    split_tokens(line, tokens);
    for (auto tok : tokens) {
      auto [it, inserted] = table.try_emplace(std::string(tok));
      if (inserted) it->second.first_seen = order++;
      ++it->second.count;
    }
  }
  if (corpus.bad()) throw IoError("error while reading corpus");

  std::vector<std::pair<const std::string*, Entry>> kept;
  for (const auto& [word, entry] : table) {
    if (entry.count >= min_count && entry.count > 0) kept.emplace_back(&word, entry);
  }
  if (kept.empty()) throw DataError("empty vocabulary (no word reaches min_count)");
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second.count != b.second.count) return a.second.count > b.second.count;
    return a.second.first_seen < b.second.first_seen;
  });

  std::vector<std::pair<std::string, std::uint64_t>> entries;
  entries.reserve(kept.size());
  for (const auto& [word, entry] : kept) entries.emplace_back(*word, entry.count);
  return Vocabulary::from_entries(std::move(entries));
}

Vocabulary build_vocabulary(const std::filesystem::path& corpus_path, std::uint64_t min_count) {
  std::ifstream in(corpus_path);
  if (!in) throw IoError("cannot open corpus " + corpus_path.string());
  return build_vocabulary(in, min_count);
}

void write_vocabulary(const Vocabulary& vocab, std::ostream& out) {
  out << kVocabMagic << " v1 " << vocab.size() << ' ' << vocab.total_tokens() << '\n';
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out << vocab.words()[i] << '\t' << vocab.counts()[i] << '\n';
  }
}

void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_vocabulary(vocab, out);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

Vocabulary read_vocabulary(std::istream& in, const std::string& source) {
  using K = ParseError::Kind;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(K::kTruncated, source, 1, false, "missing header");
  std::istringstream header(line);
  std::string magic, version;
  std::uint64_t declared_size = 0, declared_total = 0;
  header >> magic >> version;
  if (magic != kVocabMagic) throw ParseError(K::kVersion, source, 1, false, "not a vocabulary file");
  if (version != "v1") throw ParseError(K::kVersion, source, 1, false, "unsupported version " + version);
  if (!(header >> declared_size >> declared_total)) {
    throw ParseError(K::kSyntax, source, 1, false, "malformed header");
  }

  std::vector<std::pair<std::string, std::uint64_t>> entries;
  std::uint64_t line_no = 1;
  while (entries.size() < declared_size && std::getline(in, line)) {
    ++line_no;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw ParseError(K::kSyntax, source, line_no, false, "expected word<TAB>count");
    }
    std::uint64_t count = 0;
    const char* first = line.data() + tab + 1;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, count);
    if (ec != std::errc() || ptr != last || first == last) {
      throw ParseError(K::kSyntax, source, line_no, false, "bad count");
    }
    entries.emplace_back(line.substr(0, tab), count);
  }
  if (entries.size() != declared_size) {
    throw ParseError(K::kTruncated, source, line_no, false, "fewer entries than declared");
  }
  auto vocab = Vocabulary::from_entries(std::move(entries));
  if (vocab.total_tokens() != declared_total) {
    throw ParseError(K::kInvariant, source, 1, false, "total_tokens does not match sum of counts");
  }
  return vocab;
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_vocabulary(in, path.string());
}

}  // namespace gauss_embed
