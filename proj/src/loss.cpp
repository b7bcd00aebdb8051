#include "pge/loss.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pge/errors.hpp"

namespace pge {

double stable_softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::fabs(x)));
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void ModelGrads::init_shapes(const ModelParams& params) {
  enc.init_shapes({params.word, params.conv, params.proj});
  entity_rows.clear();
  attr_rows.clear();
  confidence.clear();
}

void ModelGrads::add(const ModelGrads& other) {
  enc.add(other.enc);
  for (const auto& [row, vec] : other.entity_rows) {
    auto& mine = entity_rows[row];
    if (mine.empty()) mine.assign(vec.size(), 0.0);
    for (std::size_t d = 0; d < vec.size(); ++d) mine[d] += vec[d];
  }
  for (const auto& [row, vec] : other.attr_rows) {
    auto& mine = attr_rows[row];
    if (mine.empty()) mine.assign(vec.size(), 0.0);
    for (std::size_t d = 0; d < vec.size(); ++d) mine[d] += vec[d];
  }
  for (const auto& [idx, g] : other.confidence) confidence[idx] += g;
}

void ModelGrads::clear() {
  enc.clear();
  entity_rows.clear();
  attr_rows.clear();
  confidence.clear();
}

namespace {

std::span<const double> attr_row(const ModelParams& params, std::int32_t attr) {
  return {params.attr.row(static_cast<std::size_t>(attr)), params.attr.cols};
}

void add_into(std::vector<double>& acc, const std::vector<double>& g) {
  if (acc.empty()) acc.assign(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) acc[i] += g[i];
}

}  // namespace

double example_bracket_backward(const TrainingExample& ex, const ModelParams& params,
                                const ModelConfig& cfg, double weight, ModelGrads& out) {
  const bool text_mode = cfg.mode == EmbeddingMode::text_cnn;
  const std::size_t n_neg = text_mode ? ex.negative_seqs.size() : ex.negative_entities.size();
  if (n_neg == 0) throw ValidationError("every positive needs at least one negative");

  // Forward embeddings.
  EncodeTrace title_trace, value_trace;
  std::vector<EncodeTrace> neg_traces(text_mode ? n_neg : 0);
  TextEmbedding title_emb, value_emb;
  std::vector<TextEmbedding> neg_embs(n_neg);
  if (text_mode) {
    title_emb = encode(*ex.title_seq, {params.word, params.conv, params.proj}, &title_trace);
    value_emb = encode(*ex.value_seq, {params.word, params.conv, params.proj}, &value_trace);
    for (std::size_t k = 0; k < n_neg; ++k) {
      neg_embs[k] =
          encode(*ex.negative_seqs[k], {params.word, params.conv, params.proj}, &neg_traces[k]);
    }
  } else {
    const double* trow = params.entity.row(static_cast<std::size_t>(ex.title_entity));
    const double* vrow = params.entity.row(static_cast<std::size_t>(ex.value_entity));
    title_emb.assign(trow, trow + params.entity.cols);
    value_emb.assign(vrow, vrow + params.entity.cols);
    for (std::size_t k = 0; k < n_neg; ++k) {
      const double* nrow = params.entity.row(static_cast<std::size_t>(ex.negative_entities[k]));
      neg_embs[k].assign(nrow, nrow + params.entity.cols);
    }
  }

  const auto a = attr_row(params, ex.attr_id);
  const double f_pos = score(title_emb, a, value_emb, cfg.score);
  std::vector<double> f_neg(n_neg);
  double bracket = stable_softplus(-f_pos);
  for (std::size_t k = 0; k < n_neg; ++k) {
    f_neg[k] = score(title_emb, a, neg_embs[k], cfg.score);
    bracket += stable_softplus(f_neg[k]) / static_cast<double>(n_neg);
  }
  if (!std::isfinite(bracket)) {
    throw NumericFault("non-finite loss at triple index " + std::to_string(ex.triple_index));
  }
  if (weight == 0.0) return bracket;

  // Upstream derivative per score term; the title and attribute collect
  // contributions from the positive and every negative.
  std::vector<double> dtitle, dattr;
  ScoreGrads sg;
  score_backward(title_emb, a, value_emb, cfg.score, weight * (stable_sigmoid(f_pos) - 1.0), sg);
  add_into(dtitle, sg.t);
  add_into(dattr, sg.a);
  const EncoderParams enc_view{params.word, params.conv, params.proj};
  if (text_mode) {
    encode_backward(*ex.value_seq, enc_view, value_trace, sg.v, out.enc);
  } else {
    add_into(out.entity_rows[ex.value_entity], sg.v);
  }
  for (std::size_t k = 0; k < n_neg; ++k) {
    const double up = weight * stable_sigmoid(f_neg[k]) / static_cast<double>(n_neg);
    score_backward(title_emb, a, neg_embs[k], cfg.score, up, sg);
    add_into(dtitle, sg.t);
    add_into(dattr, sg.a);
    if (text_mode) {
      encode_backward(*ex.negative_seqs[k], enc_view, neg_traces[k], sg.v, out.enc);
    } else {
      add_into(out.entity_rows[ex.negative_entities[k]], sg.v);
    }
  }
  if (text_mode) {
    encode_backward(*ex.title_seq, enc_view, title_trace, dtitle, out.enc);
  } else {
    add_into(out.entity_rows[ex.title_entity], dtitle);
  }
  add_into(out.attr_rows[ex.attr_id], dattr);
  return bracket;
}

double example_loss_backward(const TrainingExample& ex, const ModelParams& params,
                             const ModelConfig& cfg, const LossHyper& hyper, ModelGrads& out) {
  if (!hyper.noise_aware) {
    return example_bracket_backward(ex, params, cfg, 1.0, out);
  }
  const double c = (*hyper.confidence)[static_cast<std::size_t>(ex.triple_index)];
  const double bracket = example_bracket_backward(ex, params, cfg, c, out);
  out.confidence[ex.triple_index] +=
      bracket - hyper.alpha + hyper.beta * (2.0 - 4.0 * c);
  return c * bracket + hyper.alpha * (1.0 - c) +
         hyper.beta * (1.0 - c * c - (1.0 - c) * (1.0 - c));
}

namespace {

BatchResult compute_batch_serial(const std::vector<TrainingExample>& batch,
                                 const ModelParams& params, const ModelConfig& cfg,
                                 const LossHyper& hyper) {
  BatchResult res;
  res.grads.init_shapes(params);
  ModelGrads part;
  for (const auto& ex : batch) {
    part.init_shapes(params);
    res.loss += example_loss_backward(ex, params, cfg, hyper, part);
    res.grads.add(part);
  }
  return res;
}

}  // namespace

BatchResult compute_batch(const std::vector<TrainingExample>& batch, const ModelParams& params,
                          const ModelConfig& cfg, const LossHyper& hyper, ExecMode exec,
                          bool deterministic, int threads) {
#ifndef _OPENMP
  (void)threads;
  (void)deterministic;
  if (exec == ExecMode::parallel) exec = ExecMode::serial;
#endif
  if (exec == ExecMode::serial) return compute_batch_serial(batch, params, cfg, hyper);

#ifdef _OPENMP
  const int n_threads = threads > 0 ? threads : omp_get_max_threads();
  const auto n = batch.size();
  std::vector<std::string> faults(n);

  if (deterministic) {
    // Example-order reduction: bit-identical to the serial reference for any
    // thread count.
    std::vector<ModelGrads> parts(n);
    std::vector<double> losses(n, 0.0);
#pragma omp parallel for schedule(static) num_threads(n_threads)
    for (std::size_t i = 0; i < n; ++i) {
      try {
        parts[i].init_shapes(params);
        losses[i] = example_loss_backward(batch[i], params, cfg, hyper, parts[i]);
      } catch (const std::exception& e) {
        faults[i] = e.what();
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!faults[i].empty()) throw NumericFault(faults[i]);
    }
    BatchResult res;
    res.grads.init_shapes(params);
    for (std::size_t i = 0; i < n; ++i) {
      res.loss += losses[i];
      res.grads.add(parts[i]);
    }
    return res;
  }

  // Free-order reduction: per-thread partials merged in thread order.
  std::vector<ModelGrads> parts(static_cast<std::size_t>(n_threads));
  std::vector<double> losses(static_cast<std::size_t>(n_threads), 0.0);
#pragma omp parallel num_threads(n_threads)
  {
    const auto tid = static_cast<std::size_t>(omp_get_thread_num());
    parts[tid].init_shapes(params);
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
      try {
        losses[tid] += example_loss_backward(batch[i], params, cfg, hyper, parts[tid]);
      } catch (const std::exception& e) {
        faults[i] = e.what();
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!faults[i].empty()) throw NumericFault(faults[i]);
  }
  BatchResult res;
  res.grads.init_shapes(params);
  for (std::size_t t = 0; t < parts.size(); ++t) {
    res.loss += losses[t];
    res.grads.add(parts[t]);
  }
  return res;
#else
  return compute_batch_serial(batch, params, cfg, hyper);
#endif
}

}  // namespace pge
