#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "pge/graph.hpp"
#include "pge/loss.hpp"
#include "pge/model.hpp"
#include "pge/rng.hpp"
#include "pge/sampling.hpp"

namespace pge::testing {

struct TempDir {
  std::filesystem::path path;

  TempDir() {
    static std::mt19937_64 rng{std::random_device{}()};
    path = std::filesystem::temp_directory_path() /
           ("pge_test_" + std::to_string(rng()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Small fixed product graph: 3 attributes, rule-ish structure, no stopwords.
inline ProductGraph toy_graph() {
  std::vector<RawTriple> records = {
      {"alpha chips spicy queso", "flavor", "spicy queso", Label::unlabeled},
      {"alpha chips spicy queso", "ingredient", "chipotle pepper", Label::unlabeled},
      {"beta crisps cheddar", "flavor", "cheddar", Label::unlabeled},
      {"beta crisps cheddar", "ingredient", "cane sugar", Label::unlabeled},
      {"gamma brittle caramel", "flavor", "caramel", Label::unlabeled},
      {"gamma brittle caramel", "ingredient", "corn syrup", Label::unlabeled},
  };
  return build_graph(records, {});
}

struct ToyModel {
  ModelConfig cfg;
  ModelParams params;
  std::vector<double> confidence;
  std::vector<TokenSequence> title_seqs;
  std::vector<TokenSequence> value_seqs;
  std::vector<TrainingExample> batch;
};

// Random toy model over a graph, with parameters drawn wide enough that kink
// margins are healthy for finite differencing. Negatives are sampled once and
// frozen inside the batch.
inline ToyModel toy_model(const ProductGraph& graph, std::uint64_t seed, ScoreKind kind,
                          int d_word = 4, int d_embed = 4, int n_filters = 2, int k_neg = 2,
                          EmbeddingMode mode = EmbeddingMode::text_cnn) {
  ToyModel m;
  m.cfg.mode = mode;
  m.cfg.encoder.d_word = d_word;
  m.cfg.encoder.d_embed = d_embed;
  m.cfg.encoder.n_filters = n_filters;
  m.cfg.encoder.filter_widths = {1, 2, 3};
  m.cfg.encoder.max_len = 12;
  m.cfg.score.kind = kind;
  m.cfg.score.gamma = 2.0;

  RngStream rng(splitmix64(seed));
  auto draw = [&](Matrix& mat, double lo, double hi) {
    for (auto& x : mat.data) x = rng.uniform_real(lo, hi);
  };
  const std::size_t n_entities = graph.titles().size() + graph.values().size();
  if (mode == EmbeddingMode::text_cnn) {
    m.params.word = Matrix(graph.vocab().size(), static_cast<std::size_t>(d_word));
    draw(m.params.word, -0.6, 0.6);
    double* pad = m.params.word.row(Vocabulary::kPadIndex);
    std::fill(pad, pad + d_word, 0.0);
    for (int w : m.cfg.encoder.filter_widths) {
      ConvBranch b;
      b.width = w;
      b.filters = Matrix(static_cast<std::size_t>(n_filters), static_cast<std::size_t>(w * d_word));
      draw(b.filters, -0.6, 0.6);
      b.bias.resize(static_cast<std::size_t>(n_filters));
      for (auto& x : b.bias) x = rng.uniform_real(-0.3, 0.3);
      m.params.conv.branches.push_back(std::move(b));
    }
    m.params.proj.weight = Matrix(static_cast<std::size_t>(d_embed),
                                  static_cast<std::size_t>(3 * n_filters));
    draw(m.params.proj.weight, -0.6, 0.6);
    m.params.proj.bias.resize(static_cast<std::size_t>(d_embed));
    for (auto& x : m.params.proj.bias) x = rng.uniform_real(-0.3, 0.3);
  } else {
    m.params.entity = Matrix(n_entities, static_cast<std::size_t>(d_embed));
    draw(m.params.entity, -0.6, 0.6);
  }
  m.params.attr = Matrix(graph.attributes().size(), static_cast<std::size_t>(m.cfg.attr_dim()));
  if (kind == ScoreKind::rotate) {
    for (auto& x : m.params.attr.data) x = rng.uniform_real(-3.0, 3.0);
  } else {
    draw(m.params.attr, -0.6, 0.6);
  }

  const auto max_len = static_cast<std::size_t>(m.cfg.encoder.max_len);
  const auto min_len = static_cast<std::size_t>(m.cfg.encoder.max_width());
  for (const auto& t : graph.titles()) {
    m.title_seqs.push_back(preprocess(t, graph.vocab(), max_len, min_len));
  }
  for (const auto& v : graph.values()) {
    m.value_seqs.push_back(preprocess(v, graph.vocab(), max_len, min_len));
  }

  m.confidence.resize(graph.triples().size());
  for (auto& c : m.confidence) c = rng.uniform_real(0.15, 0.9);

  const auto n_titles = static_cast<std::int32_t>(graph.titles().size());
  for (std::size_t i = 0; i < graph.triples().size(); ++i) {
    TrainingExample ex;
    ex.triple_index = static_cast<std::int32_t>(i);
    ex.attr_id = graph.triples()[i].attribute_id;
    const std::int32_t title = graph.triple_title_id(i);
    const std::int32_t value = graph.triple_value_id(i);
    auto negs = sample_negative_ids(title, ex.attr_id, value, graph,
                                    static_cast<std::size_t>(k_neg), rng, false);
    if (mode == EmbeddingMode::text_cnn) {
      ex.title_seq = &m.title_seqs[static_cast<std::size_t>(title)];
      ex.value_seq = &m.value_seqs[static_cast<std::size_t>(value)];
      for (auto nid : negs) ex.negative_seqs.push_back(&m.value_seqs[static_cast<std::size_t>(nid)]);
    } else {
      ex.title_entity = title;
      ex.value_entity = n_titles + value;
      for (auto nid : negs) ex.negative_entities.push_back(n_titles + nid);
    }
    m.batch.push_back(std::move(ex));
  }
  return m;
}

}  // namespace pge::testing
