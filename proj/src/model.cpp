#include "pge/model.hpp"

#include <cmath>

#include "pge/errors.hpp"

namespace pge {

namespace {

void fill_uniform(Matrix& m, double bound, RngStream& rng) {
  for (auto& x : m.data) x = rng.uniform_real(-bound, bound);
}

}  // namespace

ModelParams init_model(const ModelConfig& cfg, std::size_t vocab_size, std::size_t n_entities,
                       std::size_t n_attrs, RngStream& rng, const Matrix* pretrained_words) {
  const auto& enc = cfg.encoder;
  if (cfg.score.kind == ScoreKind::rotate && enc.d_embed % 2 != 0) {
    throw ValidationError("RotatE requires an even embedding dimension");
  }
  const int n_filters = enc.resolved_filters();

  ModelParams p;
  if (cfg.mode == EmbeddingMode::text_cnn) {
    if (pretrained_words != nullptr) {
      if (pretrained_words->rows != vocab_size ||
          pretrained_words->cols != static_cast<std::size_t>(enc.d_word)) {
        throw ValidationError("pretrained word table shape does not match vocabulary/d_word");
      }
      p.word = *pretrained_words;
    } else {
      p.word = Matrix(vocab_size, static_cast<std::size_t>(enc.d_word));
      fill_uniform(p.word, 0.5 / enc.d_word, rng);
      double* pad = p.word.row(static_cast<std::size_t>(Vocabulary::kPadIndex));
      std::fill(pad, pad + enc.d_word, 0.0);
    }
    for (int width : enc.filter_widths) {
      ConvBranch b;
      b.width = width;
      b.filters = Matrix(static_cast<std::size_t>(n_filters),
                         static_cast<std::size_t>(width * enc.d_word));
      fill_uniform(b.filters, 0.5 / (width * enc.d_word), rng);
      b.bias.assign(static_cast<std::size_t>(n_filters), 0.0);
      p.conv.branches.push_back(std::move(b));
    }
    const auto concat = static_cast<std::size_t>(enc.concat_dim());
    p.proj.weight = Matrix(static_cast<std::size_t>(enc.d_embed), concat);
    fill_uniform(p.proj.weight, 0.5 / static_cast<double>(concat), rng);
    p.proj.bias.assign(static_cast<std::size_t>(enc.d_embed), 0.0);
  } else {
    p.entity = Matrix(n_entities, static_cast<std::size_t>(enc.d_embed));
    fill_uniform(p.entity, 0.5 / enc.d_embed, rng);
  }

  p.attr = Matrix(n_attrs, static_cast<std::size_t>(cfg.attr_dim()));
  if (cfg.score.kind == ScoreKind::rotate) {
    for (auto& x : p.attr.data) x = rng.uniform_real(-M_PI, M_PI);
  } else {
    fill_uniform(p.attr, 0.5 / enc.d_embed, rng);
  }
  return p;
}

}  // namespace pge
