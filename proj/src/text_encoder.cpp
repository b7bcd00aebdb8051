#include "pge/text_encoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pge/errors.hpp"

namespace pge {

int EncoderConfig::max_width() const {
  int w = 1;
  for (int width : filter_widths) w = std::max(w, width);
  return w;
}

int EncoderConfig::resolved_filters() const {
  if (n_filters > 0) return n_filters;
  return std::max(1, static_cast<int>(std::lround(d_embed / 3.0)));
}

TextEmbedding encode(const TokenSequence& seq, const EncoderParams& params, EncodeTrace* trace) {
  const std::size_t len = seq.size();
  const int d_word = static_cast<int>(params.word.cols);

  std::size_t concat_dim = 0;
  for (const auto& b : params.conv.branches) concat_dim += b.filters.rows;

  std::vector<double> pooled(concat_dim, 0.0);
  std::vector<int> argmax(concat_dim, 0);

  std::size_t offset = 0;
  for (const auto& branch : params.conv.branches) {
    const int w = branch.width;
    const std::size_t positions = len - static_cast<std::size_t>(w) + 1;
    for (std::size_t f = 0; f < branch.filters.rows; ++f) {
      const double* filt = branch.filters.row(f);
      double best = -std::numeric_limits<double>::infinity();
      int best_p = 0;
      for (std::size_t p = 0; p < positions; ++p) {
        double z = branch.bias[f];
        for (int u = 0; u < w; ++u) {
          const double* e = params.word.row(static_cast<std::size_t>(seq[p + u]));
          const double* fu = filt + u * d_word;
          for (int d = 0; d < d_word; ++d) z += fu[d] * e[d];
        }
        const double r = z > 0.0 ? z : 0.0;
        if (r > best) {
          best = r;
          best_p = static_cast<int>(p);
        }
      }
      pooled[offset + f] = best;
      argmax[offset + f] = best_p;
    }
    offset += branch.filters.rows;
  }

  const auto& proj = params.proj;
  TextEmbedding out(proj.weight.rows, 0.0);
  for (std::size_t i = 0; i < proj.weight.rows; ++i) {
    double acc = proj.bias[i];
    const double* wrow = proj.weight.row(i);
    for (std::size_t j = 0; j < concat_dim; ++j) acc += wrow[j] * pooled[j];
    out[i] = acc;
    if (!std::isfinite(acc)) throw NumericFault("non-finite text embedding");
  }

  if (trace != nullptr) {
    trace->pooled = std::move(pooled);
    trace->argmax = std::move(argmax);
  }
  return out;
}

void EncoderGrads::init_shapes(const EncoderParams& params) {
  word_rows.clear();
  conv.branches.clear();
  for (const auto& b : params.conv.branches) {
    ConvBranch g;
    g.width = b.width;
    g.filters = Matrix(b.filters.rows, b.filters.cols);
    g.bias.assign(b.bias.size(), 0.0);
    conv.branches.push_back(std::move(g));
  }
  proj.weight = Matrix(params.proj.weight.rows, params.proj.weight.cols);
  proj.bias.assign(params.proj.bias.size(), 0.0);
}

void EncoderGrads::add(const EncoderGrads& other) {
  for (const auto& [row, vec] : other.word_rows) {
    auto& mine = word_rows[row];
    if (mine.empty()) mine.assign(vec.size(), 0.0);
    for (std::size_t d = 0; d < vec.size(); ++d) mine[d] += vec[d];
  }
  for (std::size_t b = 0; b < conv.branches.size(); ++b) {
    auto& dst = conv.branches[b];
    const auto& src = other.conv.branches[b];
    for (std::size_t i = 0; i < dst.filters.data.size(); ++i)
      dst.filters.data[i] += src.filters.data[i];
    for (std::size_t i = 0; i < dst.bias.size(); ++i) dst.bias[i] += src.bias[i];
  }
  for (std::size_t i = 0; i < proj.weight.data.size(); ++i)
    proj.weight.data[i] += other.proj.weight.data[i];
  for (std::size_t i = 0; i < proj.bias.size(); ++i) proj.bias[i] += other.proj.bias[i];
}

void EncoderGrads::clear() {
  word_rows.clear();
  for (auto& b : conv.branches) {
    b.filters.fill(0.0);
    std::fill(b.bias.begin(), b.bias.end(), 0.0);
  }
  proj.weight.fill(0.0);
  std::fill(proj.bias.begin(), proj.bias.end(), 0.0);
}

void encode_backward(const TokenSequence& seq, const EncoderParams& params,
                     const EncodeTrace& trace, std::span<const double> upstream,
                     EncoderGrads& out) {
  const int d_word = static_cast<int>(params.word.cols);
  const std::size_t concat_dim = trace.pooled.size();
  const auto& proj = params.proj;

  for (std::size_t i = 0; i < proj.weight.rows; ++i) {
    out.proj.bias[i] += upstream[i];
    double* wg = out.proj.weight.row(i);
    for (std::size_t j = 0; j < concat_dim; ++j) wg[j] += upstream[i] * trace.pooled[j];
  }

  std::vector<double> dpool(concat_dim, 0.0);
  for (std::size_t j = 0; j < concat_dim; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < proj.weight.rows; ++i) acc += proj.weight.at(i, j) * upstream[i];
    dpool[j] = acc;
  }

  std::size_t offset = 0;
  for (std::size_t b = 0; b < params.conv.branches.size(); ++b) {
    const auto& branch = params.conv.branches[b];
    auto& gbranch = out.conv.branches[b];
    const int w = branch.width;
    for (std::size_t f = 0; f < branch.filters.rows; ++f) {
      const std::size_t idx = offset + f;
      // pooled == 0 means every pre-activation was <= 0: ReLU blocks the path.
      if (!(trace.pooled[idx] > 0.0)) continue;
      const double gz = dpool[idx];
      if (gz == 0.0) continue;
      const int p = trace.argmax[idx];
      gbranch.bias[f] += gz;
      const double* filt = branch.filters.row(f);
      double* gfilt = gbranch.filters.row(f);
      for (int u = 0; u < w; ++u) {
        const auto tok = seq[static_cast<std::size_t>(p + u)];
        const double* e = params.word.row(static_cast<std::size_t>(tok));
        for (int d = 0; d < d_word; ++d) gfilt[u * d_word + d] += gz * e[d];
        if (tok == Vocabulary::kPadIndex) continue;  // pad row stays frozen
        auto& grow = out.word_rows[tok];
        if (grow.empty()) grow.assign(static_cast<std::size_t>(d_word), 0.0);
        const double* fu = filt + u * d_word;
        for (int d = 0; d < d_word; ++d) grow[d] += gz * fu[d];
      }
    }
    offset += branch.filters.rows;
  }
}

Matrix load_word_vectors(const std::string& path, const Vocabulary& vocab, int expected_dim,
                         RngStream& rng) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open word vector file: " + path);

  std::vector<std::pair<std::string, std::vector<double>>> entries;
  int dim = -1;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream is(line);
    std::vector<std::string> parts;
    std::string tok;
    while (is >> tok) parts.push_back(tok);
    if (first && parts.size() == 2) {
      // `count dim` header
      try {
        dim = std::stoi(parts[1]);
        first = false;
        continue;
      } catch (...) {
        throw DataError("word vector line 1: malformed header");
      }
    }
    first = false;
    if (parts.size() < 2) throw DataError("word vector line " + std::to_string(line_no) + ": too few fields");
    const int line_dim = static_cast<int>(parts.size()) - 1;
    if (dim < 0) dim = line_dim;
    if (line_dim != dim) {
      throw DataError("word vector line " + std::to_string(line_no) + ": expected " +
                      std::to_string(dim) + " components, got " + std::to_string(line_dim));
    }
    std::vector<double> vec(static_cast<std::size_t>(dim));
    for (int d = 0; d < dim; ++d) {
      try {
        std::size_t used = 0;
        vec[static_cast<std::size_t>(d)] = std::stod(parts[static_cast<std::size_t>(d) + 1], &used);
        if (used != parts[static_cast<std::size_t>(d) + 1].size()) throw std::invalid_argument("");
      } catch (...) {
        throw DataError("word vector line " + std::to_string(line_no) + ": unreadable float '" +
                        parts[static_cast<std::size_t>(d) + 1] + "'");
      }
    }
    entries.emplace_back(parts[0], std::move(vec));
  }
  if (dim <= 0) throw DataError("word vector file has no vectors: " + path);
  if (expected_dim > 0 && dim != expected_dim) {
    throw DataError("word vector dimension " + std::to_string(dim) + " does not match configured d_word " +
                    std::to_string(expected_dim));
  }

  // Random rows are drawn first in row/column order so the result does not
  // depend on file ordering.
  Matrix table(vocab.size(), static_cast<std::size_t>(dim));
  const double bound = 0.5 / static_cast<double>(dim);
  for (std::size_t r = 0; r < table.rows; ++r) {
    double* row = table.row(r);
    for (int d = 0; d < dim; ++d) row[d] = rng.uniform_real(-bound, bound);
  }
  for (const auto& [token, vec] : entries) {
    if (!vocab.contains(token)) continue;
    const auto idx = static_cast<std::size_t>(vocab.lookup(token));
    std::copy(vec.begin(), vec.end(), table.row(idx));
  }
  double* pad = table.row(static_cast<std::size_t>(Vocabulary::kPadIndex));
  std::fill(pad, pad + dim, 0.0);
  return table;
}

}  // namespace pge
