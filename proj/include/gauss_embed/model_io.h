#ifndef GAUSS_EMBED_MODEL_IO_H_
#define GAUSS_EMBED_MODEL_IO_H_

#include <filesystem>
#include <string>

#include "gauss_embed/trainer.h"
#include "gauss_embed/vocabulary.h"

namespace gauss_embed {

enum class ModelFormat { kText, kBinary };

// Text:
//   #gauss-embed v1 V=<V> D=<D> cov=spherical b1=<f> b2=<f>
//   word mean_1 ... mean_D sigma          (one line per word, id order)
// Floats use 17 significant digits so a load reproduces every bit.
//
// Binary (little-endian):
//   "GAUSSEMB" u32 version=1 u8 cov=0 u64 V u64 D f64 b1 f64 b2
//   per word: u32 byte length, word bytes, D x f64 mean, f64 sigma
void save_model(const EmbeddingMatrix& params, const Vocabulary& vocab,
                const std::filesystem::path& path, ModelFormat format);

std::string serialize_model(const EmbeddingMatrix& params, const Vocabulary& vocab, ModelFormat format);

struct LoadedModel {
  EmbeddingMatrix params;
  Vocabulary vocab;  // counts are not stored in model files and read back as 0
};

// Detects the format from the first bytes. Throws IoError when the file
// cannot be read and ParseError (version / truncated / syntax / invariant)
// naming the line or byte offset otherwise.
LoadedModel load_model(const std::filesystem::path& path);
LoadedModel parse_model(const std::string& bytes, const std::string& source = "<memory>");

std::string format_double(double v);

}  // namespace gauss_embed

#endif  // GAUSS_EMBED_MODEL_IO_H_
