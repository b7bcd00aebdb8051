#include "pge/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "pge/errors.hpp"

namespace pge {

namespace {

// Uniform draw from [0, n) \ excluded. `excluded` must be sorted and distinct.
std::int32_t draw_excluding(std::size_t n, const std::vector<std::int32_t>& excluded,
                            RngStream& rng) {
  if (excluded.size() >= n) throw DataError("sampling exhausted: candidate pool is empty");
  std::size_t r = rng.uniform_index(n - excluded.size());
  auto id = static_cast<std::int32_t>(r);
  for (std::int32_t e : excluded) {
    if (id >= e) {
      ++id;
    } else {
      break;
    }
  }
  return id;
}

std::vector<std::int32_t> exclusion_set(const ProductGraph& graph, std::int32_t title,
                                        std::int32_t attr, std::int32_t value, bool filtered) {
  if (filtered) return graph.observed_values(title, attr);  // contains `value` already
  return {value};
}

}  // namespace

std::vector<std::int32_t> sample_negative_ids(std::int32_t title, std::int32_t attr,
                                              std::int32_t value, const ProductGraph& graph,
                                              std::size_t k, RngStream& rng, bool filtered) {
  const auto excluded = exclusion_set(graph, title, attr, value, filtered);
  std::vector<std::int32_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.push_back(draw_excluding(graph.values().size(), excluded, rng));
  }
  return out;
}

std::int32_t sample_replacement_value(const ProductGraph& graph, std::int32_t title,
                                      std::int32_t attr, RngStream& rng) {
  return draw_excluding(graph.values().size(), graph.observed_values(title, attr), rng);
}

std::vector<std::string> sample_negatives(const AttributeTriple& triple,
                                          const ProductGraph& graph, std::size_t k,
                                          RngStream& rng, bool filtered) {
  const std::int32_t title = graph.title_id(triple.title_text);
  const std::int32_t value = graph.value_id(triple.value_text);
  if (title < 0 || value < 0) throw DataError("triple entities not present in graph");
  auto ids = sample_negative_ids(title, triple.attribute_id, value, graph, k, rng, filtered);
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(graph.values()[id]);
  return out;
}

NoiseResult inject_noise(const ProductGraph& graph, double ratio, RngStream& rng,
                         NoiseMode mode) {
  if (!(ratio > 0.0) || ratio > 1.0) throw ValidationError("noise ratio must be in (0, 1]");
  const std::size_t n = graph.triples().size();
  const auto count = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n)));

  // Distinct originals via a partial Fisher-Yates over the index array.
  std::vector<std::size_t> indices(n);
  for (std::size_t i = 0; i < n; ++i) indices[i] = i;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + rng.uniform_index(n - i);
    std::swap(indices[i], indices[j]);
  }

  std::vector<RawTriple> records;
  records.reserve(n + count);
  for (const auto& t : graph.triples()) records.push_back(to_raw(graph, t));

  // Exclusion sets grow as corruptions are added so no duplicate triples form.
  std::unordered_map<std::int64_t, std::vector<std::int32_t>> extra_values;
  std::unordered_map<std::int64_t, std::vector<std::int32_t>> extra_titles;
  auto key_of = [](std::int32_t a, std::int32_t b) {
    return (static_cast<std::int64_t>(a) << 24) | static_cast<std::int64_t>(b);
  };

  std::vector<CorruptionRecord> log;
  log.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& original = graph.triples()[indices[i]];
    const std::int32_t title = graph.triple_title_id(indices[i]);
    const std::int32_t attr = original.attribute_id;
    const std::int32_t value = graph.triple_value_id(indices[i]);

    bool corrupt_title = false;
    if (mode == NoiseMode::head_or_tail) corrupt_title = rng.uniform_index(2) == 1;

    AttributeTriple corrupted = original;
    corrupted.label = Label::incorrect;
    if (corrupt_title) {
      // Titles t' with (t', a, v) observed are excluded.
      std::vector<std::int32_t> excluded;
      for (std::int32_t t2 = 0; t2 < static_cast<std::int32_t>(graph.titles().size()); ++t2) {
        if (graph.observed(t2, attr, value)) excluded.push_back(t2);
      }
      auto& more = extra_titles[key_of(attr, value)];
      excluded.insert(excluded.end(), more.begin(), more.end());
      std::sort(excluded.begin(), excluded.end());
      excluded.erase(std::unique(excluded.begin(), excluded.end()), excluded.end());
      const std::int32_t fresh = draw_excluding(graph.titles().size(), excluded, rng);
      corrupted.title_text = graph.titles()[fresh];
      more.push_back(fresh);
      std::sort(more.begin(), more.end());
    } else {
      std::vector<std::int32_t> excluded = graph.observed_values(title, attr);
      auto& more = extra_values[key_of(title, attr)];
      excluded.insert(excluded.end(), more.begin(), more.end());
      std::sort(excluded.begin(), excluded.end());
      excluded.erase(std::unique(excluded.begin(), excluded.end()), excluded.end());
      const std::int32_t fresh = draw_excluding(graph.values().size(), excluded, rng);
      corrupted.value_text = graph.values()[fresh];
      more.push_back(fresh);
      std::sort(more.begin(), more.end());
    }
    records.push_back(to_raw(graph, corrupted));
    log.push_back({original, corrupted});
  }

  NoiseResult result;
  result.graph = build_graph(records, graph.vocab().stopwords());
  result.log = std::move(log);
  return result;
}

ProductGraph build_inductive_split(const ProductGraph& graph,
                                   const std::vector<RawTriple>& test) {
  if (test.empty()) throw ValidationError("inductive split requires a non-empty test set");
  std::unordered_set<std::string> banned;
  for (const auto& t : test) {
    banned.insert(t.title);
    banned.insert(t.value);
  }
  std::vector<RawTriple> surviving;
  for (const auto& t : graph.triples()) {
    if (banned.count(t.title_text) || banned.count(t.value_text)) continue;
    surviving.push_back(to_raw(graph, t));
  }
  if (surviving.empty()) {
    // Caller validates; an empty training set is representable.
    ProductGraph empty;
    return empty;
  }
  return build_graph(surviving, graph.vocab().stopwords());
}

void save_corruption_log(const std::vector<CorruptionRecord>& log,
                         const std::vector<std::string>& attributes, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write corruption log: " + path);
  for (const auto& rec : log) {
    out << rec.original.title_text << '\t' << attributes[rec.original.attribute_id] << '\t'
        << rec.original.value_text << '\t' << rec.corrupted.value_text;
    if (rec.corrupted.title_text != rec.original.title_text) {
      out << '\t' << rec.corrupted.title_text;
    }
    out << '\n';
  }
}

std::vector<CorruptionRow> read_corruption_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corruption log: " + path);
  std::vector<CorruptionRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t pos = line.find('\t', start);
      if (pos == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
    if (fields.size() != 4 && fields.size() != 5) {
      throw DataError("corruption log line " + std::to_string(line_no) +
                      ": expected 4 or 5 fields");
    }
    CorruptionRow row;
    row.orig_title = fields[0];
    row.attribute = fields[1];
    row.orig_value = fields[2];
    row.corrupt_value = fields[3];
    if (fields.size() == 5) row.corrupt_title = fields[4];
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace pge
