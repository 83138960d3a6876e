#include "gauss_embed/relations.h"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>

#include "gauss_embed/errors.h"

namespace gauss_embed {

namespace {

constexpr std::array<std::string_view, static_cast<std::size_t>(Relation::kCount_)> kNames = {
    "None",
    "RelatedTo",
    "FormOf",
    "IsA",
    "PartOf",
    "HasA",
    "UsedFor",
    "CapableOf",
    "AtLocation",
    "Causes",
    "HasSubevent",
    "HasFirstSubevent",
    "HasLastSubevent",
    "HasPrerequisite",
    "HasProperty",
    "MotivatedByGoal",
    "ObstructedBy",
    "Desires",
    "CreatedBy",
    "Synonym",
    "Antonym",
    "DistinctFrom",
    "DerivedFrom",
    "SymbolOf",
    "DefinedAs",
    "MannerOf",
    "LocatedNear",
    "HasContext",
    "SimilarTo",
    "EtymologicallyRelatedTo",
    "EtymologicallyDerivedFrom",
    "CausesDesire",
    "MadeOf",
    "ReceivesAction",
    "InstanceOf",
    "Entails",
    "NotDesires",
    "NotUsedFor",
    "NotCapableOf",
    "NotHasProperty",
};

}  // namespace

std::optional<Relation> parse_relation(std::string_view name) {
  // Accept ConceptNet URIs like /r/IsA as well as bare names.
  if (name.starts_with("/r/")) name.remove_prefix(3);
  for (std::size_t i = 1; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<Relation>(i);
  }
  return std::nullopt;
}

bool is_valid_relation(Relation r) { return static_cast<std::size_t>(r) < kNames.size(); }

std::string_view relation_name(Relation r) {
  if (!is_valid_relation(r)) return "<invalid>";
  return kNames[static_cast<std::size_t>(r)];
}

RelationWhitelist default_relation_whitelist() {
  return {Relation::kDefinedAs, Relation::kInstanceOf, Relation::kSimilarTo,
          Relation::kSynonym,   Relation::kFormOf,     Relation::kIsA};
}

RelationStore::RelationStore(std::size_t vocab_size, WordId sentinel_id)
    : by_word_(vocab_size), sentinel_id_(sentinel_id) {}

std::span<const RelationEntry> RelationStore::entries(WordId w) const {
  const auto i = static_cast<std::size_t>(w);
  if (w < 0 || i >= by_word_.size()) return {};
  return by_word_[i];
}

bool RelationStore::add(WordId source, RelationEntry entry) {
  auto& list = by_word_.at(static_cast<std::size_t>(source));
  if (std::find(list.begin(), list.end(), entry) != list.end()) return false;
  list.push_back(entry);
  ++total_;
  return true;
}

std::string IngestReport::to_log() const {
  return "kept=" + std::to_string(kept) + " drop_oov=" + std::to_string(drop_oov) +
         " drop_rel=" + std::to_string(drop_rel) + " drop_malformed=" + std::to_string(drop_malformed);
}

LoadedRelations read_relations(std::istream& in, const Vocabulary& vocab,
                               const RelationWhitelist& whitelist) {
  const auto reserved = vocab.find(kNoRelationToken);
  const WordId sentinel = reserved ? *reserved : static_cast<WordId>(vocab.size());
  LoadedRelations out{RelationStore(vocab.size(), sentinel), {}};
  auto& report = out.report;

  std::string line;
  std::vector<std::string_view> fields;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;

    fields.clear();
    std::string_view rest(line);
    while (true) {
      const auto tab = rest.find('\t');
      fields.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (fields.size() != 3 ||
        std::any_of(fields.begin(), fields.end(), [](auto f) { return f.empty(); })) {
      ++report.drop_malformed;
      continue;
    }

    const auto rel = parse_relation(fields[0]);
    if (!rel || !whitelist.contains(*rel)) {
      ++report.drop_rel;
      continue;
    }
    const auto src = vocab.find(fields[1]);
    const auto dst = vocab.find(fields[2]);
    if (!src || !dst || *src == sentinel || *dst == sentinel) {
      ++report.drop_oov;
      continue;
    }

    const bool fresh = out.store.add(*src, {*rel, *dst});
    if (*rel != Relation::kIsA) out.store.add(*dst, {*rel, *src});
    if (fresh) {
      ++report.kept;
    } else {
      ++report.duplicates;
    }
  }
  if (in.bad()) throw IoError("error while reading relations");
  return out;
}

LoadedRelations load_relations(const std::filesystem::path& path, const Vocabulary& vocab,
                               const RelationWhitelist& whitelist) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open relations file " + path.string());
  return read_relations(in, vocab, whitelist);
}

RelationEntry sample_target(const RelationStore& store, WordId word, EiMode mode, Rng& rng) {
  const auto list = store.entries(word);
  const RelationEntry none{Relation::kNone, store.sentinel_id()};
  if (mode == EiMode::kAll) {
    if (list.empty()) return none;
    return list[rng.below(list.size())];
  }
  const auto n = static_cast<std::size_t>(
      std::count_if(list.begin(), list.end(), [](const auto& e) { return e.tag == Relation::kIsA; }));
  if (n == 0) return none;
  std::size_t pick = rng.below(n);
  for (const auto& e : list) {
    if (e.tag != Relation::kIsA) continue;
    if (pick-- == 0) return e;
  }
  return none;
}

std::vector<WordId> resample_negatives(const SamplingTables& tables, int k, WordId word,
                                       WordId target, Rng& rng) {
  if (k < 1) throw ConfigError("number of negatives must be >= 1");
  std::vector<WordId> out(static_cast<std::size_t>(k));
  tables.draw_negatives(word, target, rng, out);
  return out;
}

}  // namespace gauss_embed
