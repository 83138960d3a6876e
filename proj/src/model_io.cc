#include "gauss_embed/model_io.h"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "gauss_embed/errors.h"

namespace gauss_embed {

namespace {

constexpr std::string_view kTextMagic = "#gauss-embed";
constexpr std::string_view kBinaryMagic = "GAUSSEMB";
constexpr std::uint32_t kVersion = 1;

using K = ParseError::Kind;

void check_consistent(const EmbeddingMatrix& params, const Vocabulary& vocab) {
  if (params.rows() != vocab.size()) {
    throw DataError("model has " + std::to_string(params.rows()) + " rows but vocabulary has " +
                    std::to_string(vocab.size()) + " words");
  }
}

// ---- binary encoding -------------------------------------------------------

template <typename T>
void put_le(std::string& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

class ByteReader {
 public:
  ByteReader(const std::string& bytes, const std::string& source) : bytes_(bytes), source_(source) {}

  template <typename T>
  T get() {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
    need(sizeof(U));
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      bits |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(U);
    return std::bit_cast<T>(bits);
  }

  std::string get_bytes(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  void need(std::size_t n) const {
    if (remaining() < n) throw ParseError(K::kTruncated, source_, pos_, true, "unexpected end of file");
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t pos() const { return pos_; }

 private:
  const std::string& bytes_;
  const std::string& source_;
  std::size_t pos_ = 0;
};

std::string encode_binary(const EmbeddingMatrix& params, const Vocabulary& vocab) {
  std::string out(kBinaryMagic);
  put_le(out, kVersion);
  put_le(out, std::uint8_t{0});
  put_le(out, static_cast<std::uint64_t>(params.rows()));
  put_le(out, static_cast<std::uint64_t>(params.dim()));
  put_le(out, params.bias1);
  put_le(out, params.bias2);
  for (std::size_t i = 0; i < params.rows(); ++i) {
    const auto id = static_cast<WordId>(i);
    const std::string& w = vocab.word(id);
    put_le(out, static_cast<std::uint32_t>(w.size()));
    out += w;
    for (double x : params.mean(id)) put_le(out, x);
    put_le(out, params.sigma(id));
  }
  return out;
}

LoadedModel decode_binary(const std::string& bytes, const std::string& source) {
  ByteReader r(bytes, source);
  r.get_bytes(kBinaryMagic.size());
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) {
    throw ParseError(K::kVersion, source, kBinaryMagic.size(), true,
                     "unsupported version " + std::to_string(version));
  }
  const std::size_t cov_at = r.pos();
  if (r.get<std::uint8_t>() != 0) throw ParseError(K::kVersion, source, cov_at, true, "unsupported covariance kind");
  const auto rows = r.get<std::uint64_t>();
  const auto dim = r.get<std::uint64_t>();
  const double b1 = r.get<double>();
  const double b2 = r.get<double>();
  // Each record takes at least 4 + 8 * (dim + 1) bytes.
  if (dim == 0 || dim > r.remaining() / 8 || rows > r.remaining() / (4 + 8 * (dim + 1))) {
    throw ParseError(K::kTruncated, source, r.pos(), true, "header declares more data than the file holds");
  }

  EmbeddingMatrix params(rows, dim);
  params.bias1 = b1;
  params.bias2 = b2;
  std::vector<std::pair<std::string, std::uint64_t>> entries;
  entries.reserve(rows);
  std::unordered_set<std::string> seen;
  for (std::uint64_t i = 0; i < rows; ++i) {
    const std::size_t record_at = r.pos();
    const auto len = r.get<std::uint32_t>();
    std::string word = r.get_bytes(len);
    if (word.empty()) throw ParseError(K::kSyntax, source, record_at, true, "empty word");
    const auto id = static_cast<WordId>(i);
    for (double& x : params.mean(id)) {
      x = r.get<double>();
      if (!std::isfinite(x)) throw ParseError(K::kInvariant, source, record_at, true, "non-finite mean for '" + word + "'");
    }
    const double s = r.get<double>();
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw ParseError(K::kInvariant, source, record_at, true, "sigma must be positive for '" + word + "'");
    }
    params.sigma(id) = s;
    if (!seen.insert(word).second) throw ParseError(K::kInvariant, source, record_at, true, "duplicate word '" + word + "'");
    entries.emplace_back(std::move(word), 0);
  }
  if (r.remaining() != 0) throw ParseError(K::kSyntax, source, r.pos(), true, "trailing bytes after last record");
  return {std::move(params), Vocabulary::from_entries(std::move(entries))};
}

// ---- text encoding ---------------------------------------------------------

std::string encode_text(const EmbeddingMatrix& params, const Vocabulary& vocab) {
  std::string out;
  out += kTextMagic;
  out += " v1 V=" + std::to_string(params.rows()) + " D=" + std::to_string(params.dim()) +
         " cov=spherical b1=" + format_double(params.bias1) + " b2=" + format_double(params.bias2) + "\n";
  for (std::size_t i = 0; i < params.rows(); ++i) {
    const auto id = static_cast<WordId>(i);
    out += vocab.word(id);
    for (double x : params.mean(id)) {
      out += ' ';
      out += format_double(x);
    }
    out += ' ';
    out += format_double(params.sigma(id));
    out += '\n';
  }
  return out;
}

bool parse_number(std::string_view s, double& v) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_number(std::string_view s, std::uint64_t& v) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size();
}

template <typename T>
T header_field(const std::vector<std::string_view>& tokens, std::size_t index, std::string_view key,
               const std::string& source) {
  if (index >= tokens.size() || !tokens[index].starts_with(key)) {
    throw ParseError(K::kSyntax, source, 1, false, "expected header field " + std::string(key));
  }
  T v{};
  if (!parse_number(tokens[index].substr(key.size()), v)) {
    throw ParseError(K::kSyntax, source, 1, false, "bad value for header field " + std::string(key));
  }
  return v;
}

LoadedModel decode_text(const std::string& bytes, const std::string& source) {
  std::size_t pos = 0;
  std::uint64_t line_no = 0;
  bool terminated = false;
  auto next_line = [&](std::string_view& line) {
    if (pos >= bytes.size()) return false;
    const auto nl = bytes.find('\n', pos);
    const auto end = nl == std::string::npos ? bytes.size() : nl;
    line = std::string_view(bytes).substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    terminated = nl != std::string::npos;
    pos = terminated ? nl + 1 : bytes.size();
    ++line_no;
    return true;
  };

  std::string_view line;
  std::vector<std::string_view> tokens;
  if (!next_line(line)) throw ParseError(K::kTruncated, source, 1, false, "empty file");
  split_tokens(line, tokens);
  if (tokens.empty() || tokens[0] != kTextMagic) throw ParseError(K::kVersion, source, 1, false, "not a gauss-embed model");
  if (tokens.size() < 2 || tokens[1] != "v1") throw ParseError(K::kVersion, source, 1, false, "unsupported model version");
  const auto rows = header_field<std::uint64_t>(tokens, 2, "V=", source);
  const auto dim = header_field<std::uint64_t>(tokens, 3, "D=", source);
  if (tokens.size() < 5 || tokens[4] != "cov=spherical") {
    throw ParseError(K::kVersion, source, 1, false, "unsupported covariance kind");
  }
  const double b1 = header_field<double>(tokens, 5, "b1=", source);
  const double b2 = header_field<double>(tokens, 6, "b2=", source);
  if (tokens.size() != 7) throw ParseError(K::kSyntax, source, 1, false, "unexpected header fields");
  if (!terminated) throw ParseError(K::kTruncated, source, 1, false, "header is not newline-terminated");
  // Every record line needs at least 2 * (D + 2) bytes.
  if (dim == 0 || dim > bytes.size() || rows > bytes.size() / (2 * (dim + 2))) {
    throw ParseError(K::kTruncated, source, 1, false, "header declares more records than the file holds");
  }

  EmbeddingMatrix params(rows, dim);
  params.bias1 = b1;
  params.bias2 = b2;
  std::vector<std::pair<std::string, std::uint64_t>> entries;
  entries.reserve(rows);
  std::unordered_set<std::string> seen;
  for (std::uint64_t i = 0; i < rows; ++i) {
    if (!next_line(line)) {
      throw ParseError(K::kTruncated, source, line_no + 1, false,
                       "expected " + std::to_string(rows) + " records, found " + std::to_string(i));
    }
    // Records are newline-terminated; a missing newline means the file was cut.
    if (!terminated) throw ParseError(K::kTruncated, source, line_no, false, "record is not newline-terminated");
    split_tokens(line, tokens);
    if (tokens.size() != dim + 2) {
      throw ParseError(K::kSyntax, source, line_no, false,
                       "expected " + std::to_string(dim + 2) + " fields, found " + std::to_string(tokens.size()));
    }
    std::string word(tokens[0]);
    const auto id = static_cast<WordId>(i);
    auto mean = params.mean(id);
    for (std::size_t d = 0; d < dim; ++d) {
      if (!parse_number(tokens[d + 1], mean[d])) {
        throw ParseError(K::kSyntax, source, line_no, false, "bad number '" + std::string(tokens[d + 1]) + "'");
      }
      if (!std::isfinite(mean[d])) throw ParseError(K::kInvariant, source, line_no, false, "non-finite mean for '" + word + "'");
    }
    double s = 0.0;
    if (!parse_number(tokens[dim + 1], s)) {
      throw ParseError(K::kSyntax, source, line_no, false, "bad sigma '" + std::string(tokens[dim + 1]) + "'");
    }
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw ParseError(K::kInvariant, source, line_no, false, "sigma must be positive for '" + word + "'");
    }
    params.sigma(id) = s;
    if (!seen.insert(word).second) throw ParseError(K::kInvariant, source, line_no, false, "duplicate word '" + word + "'");
    entries.emplace_back(std::move(word), 0);
  }
  while (next_line(line)) {
    split_tokens(line, tokens);
    if (!tokens.empty()) throw ParseError(K::kSyntax, source, line_no, false, "unexpected data after last record");
  }
  return {std::move(params), Vocabulary::from_entries(std::move(entries))};
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

std::string serialize_model(const EmbeddingMatrix& params, const Vocabulary& vocab, ModelFormat format) {
  check_consistent(params, vocab);
  return format == ModelFormat::kText ? encode_text(params, vocab) : encode_binary(params, vocab);
}

void save_model(const EmbeddingMatrix& params, const Vocabulary& vocab,
                const std::filesystem::path& path, ModelFormat format) {
  const std::string bytes = serialize_model(params, vocab, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

LoadedModel parse_model(const std::string& bytes, const std::string& source) {
  if (bytes.starts_with(kBinaryMagic)) return decode_binary(bytes, source);
  if (bytes.starts_with("#")) return decode_text(bytes, source);
  if (bytes.empty()) throw ParseError(K::kTruncated, source, 0, true, "empty file");
  throw ParseError(K::kVersion, source, 0, true, "unrecognised model format");
}

LoadedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error while reading " + path.string());
  return parse_model(bytes, path.string());
}

}  // namespace gauss_embed
