#include "pge/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pge/errors.hpp"
#include "pge/metrics.hpp"
#include "pge/sampling.hpp"

namespace pge {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Snapshot {
  ModelParams params;
  std::vector<double> confidence;
  AdamState opt;
  std::string rng_state;
};

ModelCheckpoint make_checkpoint(const Snapshot& snap, const ProductGraph& graph,
                                const ModelConfig& model_cfg, const std::string& config_echo) {
  ModelCheckpoint ckpt;
  ckpt.config_echo = config_echo;
  ckpt.model_cfg = model_cfg;
  ckpt.vocab = graph.vocab();
  ckpt.attributes = graph.attributes();
  if (model_cfg.mode == EmbeddingMode::entity_id) {
    ckpt.entity_names.reserve(graph.titles().size() + graph.values().size());
    for (const auto& t : graph.titles()) ckpt.entity_names.push_back(t);
    for (const auto& v : graph.values()) ckpt.entity_names.push_back(v);
    ckpt.n_titles = graph.titles().size();
  }
  ckpt.params = snap.params;
  ckpt.confidence = snap.confidence;
  ckpt.opt = snap.opt;
  ckpt.rng_state = snap.rng_state;
  return ckpt;
}

}  // namespace

std::vector<double> score_with_params(const ModelParams& params, const ModelConfig& cfg,
                                      const ProductGraph& graph,
                                      const std::vector<RawTriple>& triples, int threads) {
  const auto n = triples.size();
  const auto max_len = static_cast<std::size_t>(cfg.encoder.max_len);
  const auto min_len = static_cast<std::size_t>(cfg.encoder.max_width());
  std::vector<std::int32_t> attrs(n);
  std::vector<TokenSequence> title_seqs, value_seqs;
  std::vector<std::int32_t> t_ids(n, -1), v_ids(n, -1);
  if (cfg.mode == EmbeddingMode::text_cnn) {
    title_seqs.resize(n);
    value_seqs.resize(n);
  }
  const auto n_titles = static_cast<std::int32_t>(graph.titles().size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::int32_t attr = graph.attribute_id(triples[i].attribute);
    if (attr < 0) throw DataError("unknown attribute: " + triples[i].attribute);
    attrs[i] = attr;
    if (cfg.mode == EmbeddingMode::text_cnn) {
      title_seqs[i] = preprocess(triples[i].title, graph.vocab(), max_len, min_len);
      value_seqs[i] = preprocess(triples[i].value, graph.vocab(), max_len, min_len);
    } else {
      const std::int32_t t = graph.title_id(triples[i].title);
      const std::int32_t v = graph.value_id(triples[i].value);
      if (t < 0 || v < 0) throw DataError("entity_id mode cannot score unseen entities");
      t_ids[i] = t;
      v_ids[i] = n_titles + v;
    }
  }

  std::vector<double> scores(n, 0.0);
  const EncoderParams enc_view{params.word, params.conv, params.proj};
#ifdef _OPENMP
  const int n_threads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(n_threads)
#else
  (void)threads;
#endif
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const double> a{params.attr.row(static_cast<std::size_t>(attrs[i])),
                              params.attr.cols};
    if (cfg.mode == EmbeddingMode::text_cnn) {
      const TextEmbedding t = encode(title_seqs[i], enc_view);
      const TextEmbedding v = encode(value_seqs[i], enc_view);
      scores[i] = score(t, a, v, cfg.score);
    } else {
      std::span<const double> t{params.entity.row(static_cast<std::size_t>(t_ids[i])),
                                params.entity.cols};
      std::span<const double> v{params.entity.row(static_cast<std::size_t>(v_ids[i])),
                                params.entity.cols};
      scores[i] = score(t, a, v, cfg.score);
    }
  }
  return scores;
}

TrainResult train(const ProductGraph& graph, const ModelConfig& model_cfg,
                  const TrainConfig& cfg, const std::vector<RawTriple>& valid,
                  const std::string& config_echo, const Matrix* pretrained_words) {
  if (graph.triples().empty()) throw DataError("cannot train on an empty graph");
  const std::size_t n_triples = graph.triples().size();
  const bool text_mode = model_cfg.mode == EmbeddingMode::text_cnn;

  RngPack rng = RngPack::from_seed(cfg.seed);

  // Token sequences are fixed for the whole run.
  std::vector<TokenSequence> title_seqs, value_seqs;
  const auto max_len = static_cast<std::size_t>(model_cfg.encoder.max_len);
  const auto min_len = static_cast<std::size_t>(model_cfg.encoder.max_width());
  if (text_mode) {
    title_seqs.reserve(graph.titles().size());
    for (const auto& t : graph.titles()) {
      title_seqs.push_back(preprocess(t, graph.vocab(), max_len, min_len));
    }
    value_seqs.reserve(graph.values().size());
    for (const auto& v : graph.values()) {
      value_seqs.push_back(preprocess(v, graph.vocab(), max_len, min_len));
    }
  }
  const auto n_titles = static_cast<std::int32_t>(graph.titles().size());
  const std::size_t n_entities = graph.titles().size() + graph.values().size();

  ModelParams params = init_model(model_cfg, graph.vocab().size(), n_entities,
                                  graph.attributes().size(), rng.init, pretrained_words);
  std::vector<double> confidence(n_triples, 1.0);
  AdamState opt = AdamState::like(params, n_triples);
  AdamConfig adam_cfg{cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps};
  UpdateFlags flags;
  flags.finetune_words = model_cfg.encoder.finetune_words;
  flags.update_confidence = cfg.noise_aware && !cfg.freeze_confidence;

  TrainResult result;
  Snapshot last_good{params, confidence, opt, rng.serialize()};
  Snapshot best;
  double best_ap = -1.0;

  LossHyper hyper;
  hyper.noise_aware = cfg.noise_aware;
  hyper.alpha = cfg.alpha;
  hyper.beta = cfg.beta;
  hyper.confidence = &confidence;

  std::vector<std::size_t> order(n_triples);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = Clock::now();
    rng.shuffle.shuffle(order);
    double epoch_loss = 0.0;
    bool faulted = false;
    for (std::size_t start = 0; start < n_triples && !faulted;
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(n_triples, start + static_cast<std::size_t>(cfg.batch_size));
      std::vector<TrainingExample> batch;
      batch.reserve(end - start);
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t idx = order[k];
        const auto& triple = graph.triples()[idx];
        TrainingExample ex;
        ex.triple_index = static_cast<std::int32_t>(idx);
        ex.attr_id = triple.attribute_id;
        const std::int32_t title = graph.triple_title_id(idx);
        const std::int32_t value = graph.triple_value_id(idx);
        auto negs = sample_negative_ids(title, ex.attr_id, value, graph,
                                        static_cast<std::size_t>(cfg.k_neg), rng.sampling,
                                        cfg.neg_filtered);
        if (text_mode) {
          ex.title_seq = &title_seqs[static_cast<std::size_t>(title)];
          ex.value_seq = &value_seqs[static_cast<std::size_t>(value)];
          ex.negative_seqs.reserve(negs.size());
          for (auto nid : negs) ex.negative_seqs.push_back(&value_seqs[static_cast<std::size_t>(nid)]);
        } else {
          ex.title_entity = title;
          ex.value_entity = n_titles + value;
          ex.negative_entities.reserve(negs.size());
          for (auto nid : negs) ex.negative_entities.push_back(n_titles + nid);
        }
        batch.push_back(std::move(ex));
      }
      try {
        BatchResult res = compute_batch(batch, params, model_cfg, hyper, cfg.exec,
                                        cfg.deterministic, cfg.threads);
        adam_step(params, &confidence, res.grads, opt, adam_cfg, flags);
        epoch_loss += res.loss;
      } catch (const NumericFault& e) {
        result.numeric_fault = e.what();
        faulted = true;
      }
    }
    if (faulted) break;

    EpochRow row;
    row.epoch = epoch;
    row.loss = epoch_loss;
    if (!valid.empty()) {
      auto scores = score_with_params(params, model_cfg, graph, valid, cfg.threads);
      std::vector<ScoredTriple> scored;
      scored.reserve(valid.size());
      bool has_pos = false;
      for (std::size_t i = 0; i < valid.size(); ++i) {
        if (valid[i].label == Label::unlabeled) continue;
        scored.push_back({valid[i], scores[i], valid[i].label});
        has_pos = has_pos || valid[i].label == Label::incorrect;
      }
      if (has_pos) {
        row.valid_pr_auc = pr_metrics(scored, PositiveClass::incorrect, {}).pr_auc;
      }
    }
    row.seconds = seconds_since(t0);
    result.log.push_back(row);

    last_good = Snapshot{params, confidence, opt, rng.serialize()};
    if (!std::isnan(row.valid_pr_auc) && row.valid_pr_auc > best_ap) {
      best_ap = row.valid_pr_auc;
      best = last_good;
    }
  }

  const Snapshot& chosen = !result.numeric_fault.empty() ? last_good
                           : best_ap >= 0.0              ? best
                                                         : last_good;
  result.checkpoint = make_checkpoint(chosen, graph, model_cfg, config_echo);
  return result;
}

void write_epoch_log(const std::vector<EpochRow>& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write epoch log: " + path);
  out << "epoch,loss,valid_pr_auc,seconds\n";
  out.precision(9);
  for (const auto& row : log) {
    out << row.epoch << ',' << row.loss << ',';
    if (std::isnan(row.valid_pr_auc)) {
      out << "";
    } else {
      out << row.valid_pr_auc;
    }
    out << ',' << row.seconds << '\n';
  }
}

}  // namespace pge
