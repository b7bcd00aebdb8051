#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pge/matrix.hpp"
#include "pge/rng.hpp"
#include "pge/vocabulary.hpp"

namespace pge {

using TextEmbedding = std::vector<double>;

struct EncoderConfig {
  int d_word = 300;
  int n_filters = 0;  // 0 resolves to round(d_embed / 3), at least 1
  std::vector<int> filter_widths = {1, 2, 3};
  int d_embed = 0;
  int max_len = 32;
  bool finetune_words = true;

  int max_width() const;
  int resolved_filters() const;
  int concat_dim() const { return static_cast<int>(filter_widths.size()) * resolved_filters(); }
};

// One convolution branch: filters (n_filters x width*d_word) plus bias.
struct ConvBranch {
  int width = 0;
  Matrix filters;
  std::vector<double> bias;
};

struct ConvBank {
  std::vector<ConvBranch> branches;
};

// Affine map from the concatenated pooled features to the final embedding.
struct Projection {
  Matrix weight;  // (d_embed x concat_dim)
  std::vector<double> bias;
};

// Cheap view over the encoder tensors owned by the model: word table
// (vocab_size x d_word, pad row all zeros and never updated), convolution
// bank, projection.
struct EncoderParams {
  const Matrix& word;
  const ConvBank& conv;
  const Projection& proj;
};

// Enough forward state to run the exact backward pass: pooled activations and
// the argmax position per (branch, filter). Max pooling routes gradient to the
// first maximal position; a branch whose pooled value is 0 came from
// non-positive pre-activations and passes no gradient.
struct EncodeTrace {
  std::vector<double> pooled;  // concat_dim
  std::vector<int> argmax;     // concat_dim
};

// Per-branch valid 1-d convolution over the word embeddings, ReLU,
// max-over-time pooling, concatenation, affine projection.
TextEmbedding encode(const TokenSequence& seq, const EncoderParams& params,
                     EncodeTrace* trace = nullptr);

struct EncoderGrads {
  std::unordered_map<std::int32_t, std::vector<double>> word_rows;
  ConvBank conv;
  Projection proj;

  void init_shapes(const EncoderParams& params);
  void add(const EncoderGrads& other);
  void clear();
};

void encode_backward(const TokenSequence& seq, const EncoderParams& params,
                     const EncodeTrace& trace, std::span<const double> upstream,
                     EncoderGrads& out);

// Textual word-vector file: optional `count dim` header, then one
// `token v1 ... vd` line per word. In-vocab tokens take the file vector,
// missing tokens a uniform draw in [-0.5/d, 0.5/d], and the pad row is zeroed.
// Pass expected_dim <= 0 to accept the file's dimension.
Matrix load_word_vectors(const std::string& path, const Vocabulary& vocab, int expected_dim,
                         RngStream& rng);

}  // namespace pge
