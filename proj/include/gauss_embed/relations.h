#ifndef GAUSS_EMBED_RELATIONS_H_
#define GAUSS_EMBED_RELATIONS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gauss_embed/rng.h"
#include "gauss_embed/sampling.h"
#include "gauss_embed/vocabulary.h"

namespace gauss_embed {

// ConceptNet 5 relation names. kNone tags the sentinel target.
enum class Relation : std::uint8_t {
  kNone = 0,
  kRelatedTo,
  kFormOf,
  kIsA,
  kPartOf,
  kHasA,
  kUsedFor,
  kCapableOf,
  kAtLocation,
  kCauses,
  kHasSubevent,
  kHasFirstSubevent,
  kHasLastSubevent,
  kHasPrerequisite,
  kHasProperty,
  kMotivatedByGoal,
  kObstructedBy,
  kDesires,
  kCreatedBy,
  kSynonym,
  kAntonym,
  kDistinctFrom,
  kDerivedFrom,
  kSymbolOf,
  kDefinedAs,
  kMannerOf,
  kLocatedNear,
  kHasContext,
  kSimilarTo,
  kEtymologicallyRelatedTo,
  kEtymologicallyDerivedFrom,
  kCausesDesire,
  kMadeOf,
  kReceivesAction,
  kInstanceOf,
  kEntails,
  kNotDesires,
  kNotUsedFor,
  kNotCapableOf,
  kNotHasProperty,
  kCount_,
};

std::optional<Relation> parse_relation(std::string_view name);
std::string_view relation_name(Relation r);
bool is_valid_relation(Relation r);

using RelationWhitelist = std::set<Relation>;

// DefinedAs, InstanceOf, SimilarTo, Synonym, FormOf, IsA.
RelationWhitelist default_relation_whitelist();

// Which relations feed the second loss term: every whitelisted relation, or
// IsA only.
enum class EiMode { kAll, kIsA };

struct RelationEntry {
  Relation tag = Relation::kNone;
  WordId target = -1;

  friend bool operator==(const RelationEntry&, const RelationEntry&) = default;
};

inline constexpr std::string_view kNoRelationToken = "<NO_REL>";

// Per-word relation lists. IsA is stored in the hyponym -> hypernym direction
// only; every other relation is mirrored.
class RelationStore {
 public:
  RelationStore() = default;
  RelationStore(std::size_t vocab_size, WordId sentinel_id);

  std::span<const RelationEntry> entries(WordId w) const;
  WordId sentinel_id() const { return sentinel_id_; }
  std::size_t vocab_size() const { return by_word_.size(); }
  std::size_t total_entries() const { return total_; }

  // Adds the entry unless already present. Returns false for duplicates.
  bool add(WordId source, RelationEntry entry);

  friend bool operator==(const RelationStore&, const RelationStore&) = default;

 private:
  std::vector<std::vector<RelationEntry>> by_word_;
  WordId sentinel_id_ = -1;
  std::size_t total_ = 0;
};

struct IngestReport {
  std::uint64_t kept = 0;
  std::uint64_t drop_oov = 0;
  std::uint64_t drop_rel = 0;
  std::uint64_t drop_malformed = 0;
  std::uint64_t duplicates = 0;

  // `kept=<n> drop_oov=<n> drop_rel=<n> drop_malformed=<n>`
  std::string to_log() const;
};

struct LoadedRelations {
  RelationStore store;
  IngestReport report;
};

// Reads `relation<TAB>word1<TAB>word2` lines. Blank lines and lines starting
// with '#' are ignored; lines without exactly three non-empty fields are
// counted as malformed. The sentinel id is the vocabulary's `<NO_REL>` row if
// present, otherwise vocab.size() (the caller appends the row before
// training).
LoadedRelations read_relations(std::istream& in, const Vocabulary& vocab,
                               const RelationWhitelist& whitelist);
LoadedRelations load_relations(const std::filesystem::path& path, const Vocabulary& vocab,
                               const RelationWhitelist& whitelist);

// Uniform draw over the word's entries (IsA entries only for EiMode::kIsA);
// {kNone, sentinel} when there is nothing to draw.
RelationEntry sample_target(const RelationStore& store, WordId word, EiMode mode, Rng& rng);

// Negatives for the relation term, drawn independently of the context term's
// negatives with the same collision-redraw rule.
std::vector<WordId> resample_negatives(const SamplingTables& tables, int k, WordId word,
                                       WordId target, Rng& rng);

}  // namespace gauss_embed

#endif  // GAUSS_EMBED_RELATIONS_H_
