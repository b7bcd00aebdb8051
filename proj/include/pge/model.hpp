#pragma once

#include <cstddef>

#include "pge/matrix.hpp"
#include "pge/rng.hpp"
#include "pge/scoring.hpp"
#include "pge/text_encoder.hpp"

namespace pge {

// text_cnn drives entity embeddings through the CNN encoder; entity_id is the
// structure-only ablation that looks entities up in a plain id table.
enum class EmbeddingMode { text_cnn, entity_id };

struct ModelConfig {
  EmbeddingMode mode = EmbeddingMode::text_cnn;
  EncoderConfig encoder;
  ScoreConfig score;

  int attr_dim() const {
    return score.kind == ScoreKind::rotate ? encoder.d_embed / 2 : encoder.d_embed;
  }
};

struct ModelParams {
  Matrix word;    // (vocab x d_word), text_cnn mode
  ConvBank conv;  // text_cnn mode
  Projection proj;
  Matrix entity;  // (n_entities x d_embed), entity_id mode
  Matrix attr;    // (n_attrs x attr_dim); RotatE rows store phases in [-pi, pi)
};

// Uniform [-0.5/fan_in, 0.5/fan_in] init for word rows, filters and
// projection; RotatE attribute rows draw phases uniformly from [-pi, pi).
// Draw order is fixed (word, conv, proj, entity, attr) for reproducibility.
// A pretrained word table, when given, replaces the word draws.
ModelParams init_model(const ModelConfig& cfg, std::size_t vocab_size, std::size_t n_entities,
                       std::size_t n_attrs, RngStream& rng,
                       const Matrix* pretrained_words = nullptr);

}  // namespace pge
