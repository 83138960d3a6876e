#ifndef GAUSS_EMBED_VOCABULARY_H_
#define GAUSS_EMBED_VOCABULARY_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gauss_embed {

using WordId = std::int32_t;

// Word <-> dense id map with occurrence counts.
//
// Ids are assigned in descending count order, ties broken by the order in
// which words were first seen in the corpus. `total_tokens()` is the sum of
// the retained counts. Reserved rows (see add_reserved) are appended after
// the corpus words with count 0 and never enter the sampling tables.
class Vocabulary {
 public:
  Vocabulary() = default;

  // Builds from already-ordered (word, count) entries. Throws DataError on
  // duplicate words.
  static Vocabulary from_entries(std::vector<std::pair<std::string, std::uint64_t>> entries);

  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }

  const std::string& word(WordId id) const { return words_.at(static_cast<std::size_t>(id)); }
  std::uint64_t count(WordId id) const { return counts_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t total_tokens() const { return total_tokens_; }

  std::optional<WordId> find(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word).has_value(); }

  // Relative frequency f(w) = count / total_tokens.
  double frequency(WordId id) const;

  // Appends a zero-count row (or returns the existing id if present).
  WordId add_reserved(const std::string& word);

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, WordId> id_of_;
  std::uint64_t total_tokens_ = 0;
};

// Counts whitespace-separated tokens and keeps those seen at least
// `min_count` times. Throws IoError if the file cannot be read and DataError
// if nothing survives the threshold.
Vocabulary build_vocabulary(const std::filesystem::path& corpus_path, std::uint64_t min_count);
Vocabulary build_vocabulary(std::istream& corpus, std::uint64_t min_count);

// `#gauss-embed-vocab v1 <V> <total_tokens>` header, then `word<TAB>count`.
void write_vocabulary(const Vocabulary& vocab, std::ostream& out);
void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path);
Vocabulary read_vocabulary(std::istream& in, const std::string& source = "<stream>");
Vocabulary load_vocabulary(const std::filesystem::path& path);

// Splits on ASCII whitespace (space, tab, CR, LF, VT, FF).
void split_tokens(std::string_view line, std::vector<std::string_view>& out);

}  // namespace gauss_embed

#endif  // GAUSS_EMBED_VOCABULARY_H_
