#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "pge/vocabulary.hpp"

namespace pge {

enum class Label : std::uint8_t { unlabeled = 0, correct = 1, incorrect = 2 };

// One (title, attribute, value) fact inside a graph; the attribute is an index
// into the owning graph's attribute list.
struct AttributeTriple {
  std::string title_text;
  std::int32_t attribute_id = -1;
  std::string value_text;
  Label label = Label::unlabeled;
};

// Parsed TSV record, attribute still by name. Used for files that are read
// against an existing graph/checkpoint (valid/test sets, detect input).
struct RawTriple {
  std::string title;
  std::string attribute;
  std::string value;
  Label label = Label::unlabeled;
};

// Indexed, immutable store of attribute triples: G = {titles, attributes,
// values, triples} plus the token vocabulary built from all texts.
class ProductGraph {
 public:
  ProductGraph() = default;

  const std::vector<AttributeTriple>& triples() const { return triples_; }
  const std::vector<std::string>& attributes() const { return attributes_; }
  const std::vector<std::string>& titles() const { return titles_; }
  const std::vector<std::string>& values() const { return values_; }
  const Vocabulary& vocab() const { return vocab_; }

  std::int32_t title_id(const std::string& text) const;
  std::int32_t value_id(const std::string& text) const;
  std::int32_t attribute_id(const std::string& name) const;

  // Per-triple integer view, aligned with triples().
  std::int32_t triple_title_id(std::size_t i) const { return triple_title_ids_[i]; }
  std::int32_t triple_value_id(std::size_t i) const { return triple_value_ids_[i]; }

  bool observed(std::int32_t title, std::int32_t attr, std::int32_t value) const;

  // Sorted distinct value ids v' with (title, attr, v') observed.
  const std::vector<std::int32_t>& observed_values(std::int32_t title, std::int32_t attr) const;

 private:
  friend ProductGraph build_graph(const std::vector<RawTriple>& records,
                                  const std::unordered_set<std::string>& stopwords);
  friend class GraphBuilder;

  std::vector<AttributeTriple> triples_;
  std::vector<std::string> attributes_;
  std::vector<std::string> titles_;
  std::vector<std::string> values_;
  std::vector<std::int32_t> triple_title_ids_;
  std::vector<std::int32_t> triple_value_ids_;
  Vocabulary vocab_;
  std::unordered_map<std::string, std::int32_t> title_index_;
  std::unordered_map<std::string, std::int32_t> value_index_;
  std::unordered_map<std::string, std::int32_t> attr_index_;
  std::unordered_map<std::int64_t, std::vector<std::int32_t>> observed_;
};

// Parses a triple TSV: `title \t attribute \t value [\t label]`, label in
// {0,1} (1 = correct), lines starting with '#' ignored. Malformed lines raise
// a DataError naming the line number.
std::vector<RawTriple> read_raw_triples(const std::string& path);

void write_raw_triples(const std::vector<RawTriple>& records, const std::string& path);

// Builds the indexed graph: exact-duplicate (title, attribute, value) records
// are dropped (first wins), attributes and entities keep first-seen order, and
// the vocabulary collects all title/value tokens after preprocessing.
ProductGraph build_graph(const std::vector<RawTriple>& records,
                         const std::unordered_set<std::string>& stopwords);

ProductGraph load_triples(const std::string& path,
                          const std::unordered_set<std::string>& stopwords);

// Serializes back to the triple TSV format; load_triples(save_triples(g)) == g.
void save_triples(const ProductGraph& graph, const std::string& path);

// Graph restricted to the given triple indices; entity sets and vocabulary are
// rebuilt from the surviving triples.
ProductGraph subgraph(const ProductGraph& graph, const std::vector<std::size_t>& indices);

RawTriple to_raw(const ProductGraph& graph, const AttributeTriple& t);

}  // namespace pge
