#include "pge/graph.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "pge/errors.hpp"

namespace pge {

namespace {

std::int64_t pair_key(std::int32_t title, std::int32_t attr) {
  return (static_cast<std::int64_t>(title) << 20) | static_cast<std::int64_t>(attr);
}

std::vector<std::string> split_tabs(const std::string& line) {
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
  return fields;
}

}  // namespace

std::int32_t ProductGraph::title_id(const std::string& text) const {
  auto it = title_index_.find(text);
  return it == title_index_.end() ? -1 : it->second;
}

std::int32_t ProductGraph::value_id(const std::string& text) const {
  auto it = value_index_.find(text);
  return it == value_index_.end() ? -1 : it->second;
}

std::int32_t ProductGraph::attribute_id(const std::string& name) const {
  auto it = attr_index_.find(name);
  return it == attr_index_.end() ? -1 : it->second;
}

bool ProductGraph::observed(std::int32_t title, std::int32_t attr, std::int32_t value) const {
  auto it = observed_.find(pair_key(title, attr));
  if (it == observed_.end()) return false;
  return std::binary_search(it->second.begin(), it->second.end(), value);
}

const std::vector<std::int32_t>& ProductGraph::observed_values(std::int32_t title,
                                                               std::int32_t attr) const {
  static const std::vector<std::int32_t> kEmpty;
  auto it = observed_.find(pair_key(title, attr));
  return it == observed_.end() ? kEmpty : it->second;
}

std::vector<RawTriple> read_raw_triples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open triple file: " + path);
  std::vector<RawTriple> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == EOF) break;  // trailing newline
    if (!line.empty() && line[0] == '#') continue;
    auto fields = split_tabs(line);
    if (fields.size() < 3 || fields.size() > 4) {
      throw DataError("line " + std::to_string(line_no) + ": expected 3 or 4 tab-separated fields, got " +
                      std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty() || fields[2].empty()) {
      throw DataError("line " + std::to_string(line_no) + ": empty title/attribute/value field");
    }
    RawTriple r;
    r.title = fields[0];
    r.attribute = fields[1];
    r.value = fields[2];
    if (fields.size() == 4) {
      if (fields[3] == "1") {
        r.label = Label::correct;
      } else if (fields[3] == "0") {
        r.label = Label::incorrect;
      } else {
        throw DataError("line " + std::to_string(line_no) + ": label must be 0 or 1, got '" +
                        fields[3] + "'");
      }
    }
    records.push_back(std::move(r));
  }
  return records;
}

void write_raw_triples(const std::vector<RawTriple>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write triple file: " + path);
  for (const auto& r : records) {
    out << r.title << '\t' << r.attribute << '\t' << r.value;
    if (r.label == Label::correct) out << "\t1";
    if (r.label == Label::incorrect) out << "\t0";
    out << '\n';
  }
}

ProductGraph build_graph(const std::vector<RawTriple>& records,
                         const std::unordered_set<std::string>& stopwords) {
  if (records.empty()) throw DataError("empty input: no triples");
  ProductGraph g;
  g.vocab_ = Vocabulary(stopwords);
  std::unordered_set<std::string> seen;
  seen.reserve(records.size());

  auto intern_title = [&](const std::string& text) {
    auto it = g.title_index_.find(text);
    if (it != g.title_index_.end()) return it->second;
    const auto id = static_cast<std::int32_t>(g.titles_.size());
    g.titles_.push_back(text);
    g.title_index_.emplace(text, id);
    for (const auto& tok : content_tokens(text, g.vocab_.stopwords())) g.vocab_.add(tok);
    return id;
  };
  auto intern_value = [&](const std::string& text) {
    auto it = g.value_index_.find(text);
    if (it != g.value_index_.end()) return it->second;
    const auto id = static_cast<std::int32_t>(g.values_.size());
    g.values_.push_back(text);
    g.value_index_.emplace(text, id);
    for (const auto& tok : content_tokens(text, g.vocab_.stopwords())) g.vocab_.add(tok);
    return id;
  };

  for (const auto& r : records) {
    std::string key = r.title + '\t' + r.attribute + '\t' + r.value;
    if (!seen.insert(std::move(key)).second) continue;

    std::int32_t attr;
    auto it = g.attr_index_.find(r.attribute);
    if (it != g.attr_index_.end()) {
      attr = it->second;
    } else {
      attr = static_cast<std::int32_t>(g.attributes_.size());
      g.attributes_.push_back(r.attribute);
      g.attr_index_.emplace(r.attribute, attr);
    }
    const std::int32_t title = intern_title(r.title);
    const std::int32_t value = intern_value(r.value);

    g.triples_.push_back({r.title, attr, r.value, r.label});
    g.triple_title_ids_.push_back(title);
    g.triple_value_ids_.push_back(value);
    g.observed_[pair_key(title, attr)].push_back(value);
  }
  for (auto& [key, values] : g.observed_) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
  }
  return g;
}

ProductGraph load_triples(const std::string& path,
                          const std::unordered_set<std::string>& stopwords) {
  return build_graph(read_raw_triples(path), stopwords);
}

void save_triples(const ProductGraph& graph, const std::string& path) {
  std::vector<RawTriple> records;
  records.reserve(graph.triples().size());
  for (const auto& t : graph.triples()) records.push_back(to_raw(graph, t));
  write_raw_triples(records, path);
}

ProductGraph subgraph(const ProductGraph& graph, const std::vector<std::size_t>& indices) {
  std::vector<RawTriple> records;
  records.reserve(indices.size());
  for (std::size_t i : indices) records.push_back(to_raw(graph, graph.triples()[i]));
  return build_graph(records, graph.vocab().stopwords());
}

RawTriple to_raw(const ProductGraph& graph, const AttributeTriple& t) {
  return {t.title_text, graph.attributes()[t.attribute_id], t.value_text, t.label};
}

}  // namespace pge
