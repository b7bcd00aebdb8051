#include "pge/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

#include <zlib.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pge/errors.hpp"

namespace pge {

namespace {

constexpr char kMagic[8] = {'P', 'G', 'E', 'C', 'H', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

// ---- little-endian encoding into a byte string --------------------------

void put_u32(std::string& out, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t x) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
}

void put_i32(std::string& out, std::int32_t x) { put_u32(out, static_cast<std::uint32_t>(x)); }
void put_i64(std::string& out, std::int64_t x) { put_u64(out, static_cast<std::uint64_t>(x)); }
void put_u8(std::string& out, std::uint8_t x) { out.push_back(static_cast<char>(x)); }

void put_f64(std::string& out, double x) { put_u64(out, std::bit_cast<std::uint64_t>(x)); }

void put_string(std::string& out, const std::string& s) {
  put_u64(out, s.size());
  out.append(s);
}

void put_doubles(std::string& out, const std::vector<double>& v) {
  put_u64(out, v.size());
  for (double x : v) put_f64(out, x);
}

void put_matrix(std::string& out, const Matrix& m) {
  put_u64(out, m.rows);
  put_u64(out, m.cols);
  for (double x : m.data) put_f64(out, x);
}

// ---- decoding ------------------------------------------------------------

struct Reader {
  const std::string& buf;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > buf.size()) throw DataError("corrupt checkpoint: truncated section");
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(buf[pos++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t x = 0;
    for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 4;
    return x;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 8;
    return x;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint64_t n = u64();
    need(n);
    std::string s = buf.substr(pos, n);
    pos += n;
    return s;
  }
  std::vector<double> doubles() {
    const std::uint64_t n = u64();
    std::vector<double> v(n);
    for (auto& x : v) x = f64();
    return v;
  }
  Matrix matrix() {
    Matrix m;
    m.rows = u64();
    m.cols = u64();
    m.data.resize(m.rows * m.cols);
    for (auto& x : m.data) x = f64();
    return m;
  }
};

// ---- section payloads ----------------------------------------------------

std::string encode_model_cfg(const ModelConfig& cfg) {
  std::string s;
  put_u8(s, cfg.mode == EmbeddingMode::text_cnn ? 0 : 1);
  put_u8(s, cfg.score.kind == ScoreKind::transe ? 0 : 1);
  put_u8(s, cfg.score.norm == NormKind::l1 ? 0 : 1);
  put_u8(s, cfg.score.squared ? 1 : 0);
  put_f64(s, cfg.score.gamma);
  put_i32(s, cfg.encoder.d_word);
  put_i32(s, cfg.encoder.n_filters);
  put_u64(s, cfg.encoder.filter_widths.size());
  for (int w : cfg.encoder.filter_widths) put_i32(s, w);
  put_i32(s, cfg.encoder.d_embed);
  put_i32(s, cfg.encoder.max_len);
  put_u8(s, cfg.encoder.finetune_words ? 1 : 0);
  return s;
}

ModelConfig decode_model_cfg(Reader& r) {
  ModelConfig cfg;
  cfg.mode = r.u8() == 0 ? EmbeddingMode::text_cnn : EmbeddingMode::entity_id;
  cfg.score.kind = r.u8() == 0 ? ScoreKind::transe : ScoreKind::rotate;
  cfg.score.norm = r.u8() == 0 ? NormKind::l1 : NormKind::l2;
  cfg.score.squared = r.u8() != 0;
  cfg.score.gamma = r.f64();
  cfg.encoder.d_word = r.i32();
  cfg.encoder.n_filters = r.i32();
  const std::uint64_t nw = r.u64();
  cfg.encoder.filter_widths.clear();
  for (std::uint64_t i = 0; i < nw; ++i) cfg.encoder.filter_widths.push_back(r.i32());
  cfg.encoder.d_embed = r.i32();
  cfg.encoder.max_len = r.i32();
  cfg.encoder.finetune_words = r.u8() != 0;
  return cfg;
}

std::string encode_vocab(const Vocabulary& vocab) {
  std::string s;
  put_u64(s, vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) put_string(s, vocab.token(static_cast<std::int32_t>(i)));
  std::vector<std::string> stop(vocab.stopwords().begin(), vocab.stopwords().end());
  std::sort(stop.begin(), stop.end());
  put_u64(s, stop.size());
  for (const auto& w : stop) put_string(s, w);
  return s;
}

Vocabulary decode_vocab(Reader& r) {
  const std::uint64_t n = r.u64();
  std::vector<std::string> tokens(n);
  for (auto& t : tokens) t = r.str();
  const std::uint64_t ns = r.u64();
  std::unordered_set<std::string> stop;
  for (std::uint64_t i = 0; i < ns; ++i) stop.insert(r.str());
  Vocabulary v(std::move(stop));
  for (std::uint64_t i = 2; i < n; ++i) v.add(tokens[i]);
  return v;
}

std::string encode_params(const ModelParams& p) {
  std::string s;
  put_matrix(s, p.word);
  put_u64(s, p.conv.branches.size());
  for (const auto& b : p.conv.branches) {
    put_i32(s, b.width);
    put_matrix(s, b.filters);
    put_doubles(s, b.bias);
  }
  put_matrix(s, p.proj.weight);
  put_doubles(s, p.proj.bias);
  put_matrix(s, p.entity);
  put_matrix(s, p.attr);
  return s;
}

ModelParams decode_params(Reader& r) {
  ModelParams p;
  p.word = r.matrix();
  const std::uint64_t nb = r.u64();
  for (std::uint64_t i = 0; i < nb; ++i) {
    ConvBranch b;
    b.width = r.i32();
    b.filters = r.matrix();
    b.bias = r.doubles();
    p.conv.branches.push_back(std::move(b));
  }
  p.proj.weight = r.matrix();
  p.proj.bias = r.doubles();
  p.entity = r.matrix();
  p.attr = r.matrix();
  return p;
}

std::string encode_strings(const std::vector<std::string>& v) {
  std::string s;
  put_u64(s, v.size());
  for (const auto& x : v) put_string(s, x);
  return s;
}

std::vector<std::string> decode_strings(Reader& r) {
  const std::uint64_t n = r.u64();
  std::vector<std::string> v(n);
  for (auto& x : v) x = r.str();
  return v;
}

void write_section(std::ofstream& out, std::uint32_t id, const std::string& payload) {
  std::string head;
  put_u32(head, id);
  put_u64(head, payload.size());
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  const auto crc = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(payload.data()), static_cast<uInt>(payload.size())));
  std::string tail;
  put_u32(tail, crc);
  out.write(tail.data(), static_cast<std::streamsize>(tail.size()));
}

std::string read_section(std::ifstream& in, std::uint32_t expected_id) {
  char head[12];
  if (!in.read(head, 12)) throw DataError("corrupt checkpoint: truncated");
  std::uint32_t id = 0;
  for (int i = 0; i < 4; ++i) id |= static_cast<std::uint32_t>(static_cast<unsigned char>(head[i])) << (8 * i);
  std::uint64_t size = 0;
  for (int i = 0; i < 8; ++i) size |= static_cast<std::uint64_t>(static_cast<unsigned char>(head[4 + i])) << (8 * i);
  if (id != expected_id) throw DataError("corrupt checkpoint: unexpected section " + std::to_string(id));
  std::string payload(size, '\0');
  if (size > 0 && !in.read(payload.data(), static_cast<std::streamsize>(size))) {
    throw DataError("corrupt checkpoint: truncated");
  }
  char tail[4];
  if (!in.read(tail, 4)) throw DataError("corrupt checkpoint: truncated");
  std::uint32_t stored = 0;
  for (int i = 0; i < 4; ++i) stored |= static_cast<std::uint32_t>(static_cast<unsigned char>(tail[i])) << (8 * i);
  const auto actual = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(payload.data()), static_cast<uInt>(payload.size())));
  if (stored != actual) {
    throw DataError("corrupt checkpoint: checksum mismatch in section " + std::to_string(expected_id));
  }
  return payload;
}

enum SectionId : std::uint32_t {
  kConfigEcho = 1,
  kModelCfg = 2,
  kVocab = 3,
  kAttributes = 4,
  kEntities = 5,
  kParams = 6,
  kConfidence = 7,
  kOptimizer = 8,
  kRngState = 9,
};

}  // namespace

void save_checkpoint(const ModelCheckpoint& ckpt, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out.write(kMagic, 8);
  std::string version;
  put_u32(version, kVersion);
  out.write(version.data(), 4);

  write_section(out, kConfigEcho, ckpt.config_echo);
  write_section(out, kModelCfg, encode_model_cfg(ckpt.model_cfg));
  write_section(out, kVocab, encode_vocab(ckpt.vocab));
  write_section(out, kAttributes, encode_strings(ckpt.attributes));
  {
    std::string s;
    put_u64(s, ckpt.n_titles);
    s += encode_strings(ckpt.entity_names);
    write_section(out, kEntities, s);
  }
  write_section(out, kParams, encode_params(ckpt.params));
  {
    std::string s;
    put_doubles(s, ckpt.confidence);
    write_section(out, kConfidence, s);
  }
  {
    std::string s;
    put_i64(s, ckpt.opt.step);
    s += encode_params(ckpt.opt.m);
    s += encode_params(ckpt.opt.v);
    put_doubles(s, ckpt.opt.conf_m);
    put_doubles(s, ckpt.opt.conf_v);
    write_section(out, kOptimizer, s);
  }
  write_section(out, kRngState, ckpt.rng_state);
  if (!out) throw DataError("write failure on checkpoint: " + path);
}

ModelCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
    throw DataError("corrupt checkpoint: bad magic number");
  }
  char vbuf[4];
  if (!in.read(vbuf, 4)) throw DataError("corrupt checkpoint: truncated");
  std::uint32_t version = 0;
  for (int i = 0; i < 4; ++i) version |= static_cast<std::uint32_t>(static_cast<unsigned char>(vbuf[i])) << (8 * i);
  if (version != kVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version) + " (expected " +
                    std::to_string(kVersion) + ")");
  }

  ModelCheckpoint ckpt;
  ckpt.config_echo = read_section(in, kConfigEcho);
  {
    std::string payload = read_section(in, kModelCfg);
    Reader r{payload};
    ckpt.model_cfg = decode_model_cfg(r);
  }
  {
    std::string payload = read_section(in, kVocab);
    Reader r{payload};
    ckpt.vocab = decode_vocab(r);
  }
  {
    std::string payload = read_section(in, kAttributes);
    Reader r{payload};
    ckpt.attributes = decode_strings(r);
  }
  {
    std::string payload = read_section(in, kEntities);
    Reader r{payload};
    ckpt.n_titles = r.u64();
    ckpt.entity_names = decode_strings(r);
  }
  {
    std::string payload = read_section(in, kParams);
    Reader r{payload};
    ckpt.params = decode_params(r);
  }
  {
    std::string payload = read_section(in, kConfidence);
    Reader r{payload};
    ckpt.confidence = r.doubles();
  }
  {
    std::string payload = read_section(in, kOptimizer);
    Reader r{payload};
    ckpt.opt.step = r.i64();
    ckpt.opt.m = decode_params(r);
    ckpt.opt.v = decode_params(r);
    ckpt.opt.conf_m = r.doubles();
    ckpt.opt.conf_v = r.doubles();
  }
  ckpt.rng_state = read_section(in, kRngState);
  return ckpt;
}

std::vector<double> score_raw_triples(const ModelCheckpoint& ckpt,
                                      const std::vector<RawTriple>& triples, int threads) {
  const auto& cfg = ckpt.model_cfg;
  std::unordered_map<std::string, std::int32_t> attr_index;
  for (std::size_t i = 0; i < ckpt.attributes.size(); ++i) {
    attr_index.emplace(ckpt.attributes[i], static_cast<std::int32_t>(i));
  }
  std::unordered_map<std::string, std::int32_t> entity_index;
  if (cfg.mode == EmbeddingMode::entity_id) {
    for (std::size_t i = 0; i < ckpt.entity_names.size(); ++i) {
      entity_index.emplace(ckpt.entity_names[i], static_cast<std::int32_t>(i));
    }
  }

  const auto n = triples.size();
  std::vector<std::int32_t> attrs(n);
  std::vector<TokenSequence> title_seqs(n), value_seqs(n);
  std::vector<std::int32_t> t_ids(n, -1), v_ids(n, -1);
  const auto max_len = static_cast<std::size_t>(cfg.encoder.max_len);
  const auto min_len = static_cast<std::size_t>(cfg.encoder.max_width());
  for (std::size_t i = 0; i < n; ++i) {
    auto it = attr_index.find(triples[i].attribute);
    if (it == attr_index.end()) throw DataError("unknown attribute: " + triples[i].attribute);
    attrs[i] = it->second;
    if (cfg.mode == EmbeddingMode::text_cnn) {
      title_seqs[i] = preprocess(triples[i].title, ckpt.vocab, max_len, min_len);
      value_seqs[i] = preprocess(triples[i].value, ckpt.vocab, max_len, min_len);
    } else {
      auto ti = entity_index.find(triples[i].title);
      auto vi = entity_index.find(triples[i].value);
      if (ti == entity_index.end() || vi == entity_index.end()) {
        throw DataError("entity_id mode cannot score unseen entities (triple " +
                        std::to_string(i) + ")");
      }
      t_ids[i] = ti->second;
      v_ids[i] = vi->second;
    }
  }

  std::vector<double> scores(n, 0.0);
  const EncoderParams enc_view{ckpt.params.word, ckpt.params.conv, ckpt.params.proj};
#ifdef _OPENMP
  const int n_threads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(n_threads)
#else
  (void)threads;
#endif
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const double> a{ckpt.params.attr.row(static_cast<std::size_t>(attrs[i])),
                              ckpt.params.attr.cols};
    if (cfg.mode == EmbeddingMode::text_cnn) {
      const TextEmbedding t = encode(title_seqs[i], enc_view);
      const TextEmbedding v = encode(value_seqs[i], enc_view);
      scores[i] = score(t, a, v, cfg.score);
    } else {
      std::span<const double> t{ckpt.params.entity.row(static_cast<std::size_t>(t_ids[i])),
                                ckpt.params.entity.cols};
      std::span<const double> v{ckpt.params.entity.row(static_cast<std::size_t>(v_ids[i])),
                                ckpt.params.entity.cols};
      scores[i] = score(t, a, v, cfg.score);
    }
  }
  return scores;
}

}  // namespace pge
