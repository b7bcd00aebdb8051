#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace pge {

using TokenSequence = std::vector<std::int32_t>;

// Token table with two reserved slots. Indices 2.. map bijectively to the
// tokens seen while building; pad and unk never collide with real tokens.
class Vocabulary {
 public:
  static constexpr std::int32_t kPadIndex = 0;
  static constexpr std::int32_t kUnkIndex = 1;

  Vocabulary();
  explicit Vocabulary(std::unordered_set<std::string> stopwords);

  // Returns the existing index or inserts the token at the next free slot.
  std::int32_t add(const std::string& token);

  // kUnkIndex for out-of-vocabulary tokens.
  std::int32_t lookup(const std::string& token) const;

  bool contains(const std::string& token) const;
  std::size_t size() const { return index_to_token_.size(); }
  const std::string& token(std::int32_t index) const { return index_to_token_.at(index); }
  bool is_stopword(const std::string& token) const { return stopwords_.count(token) > 0; }
  const std::unordered_set<std::string>& stopwords() const { return stopwords_; }

  bool operator==(const Vocabulary& o) const {
    return index_to_token_ == o.index_to_token_ && stopwords_ == o.stopwords_;
  }

 private:
  std::unordered_map<std::string, std::int32_t> token_to_index_;
  std::vector<std::string> index_to_token_;
  std::unordered_set<std::string> stopwords_;
};

// One token per line, UTF-8.
std::unordered_set<std::string> load_stopwords(const std::string& path);

// Lowercase, strip ASCII punctuation, split on whitespace.
std::vector<std::string> tokenize(const std::string& raw);

// tokenize() minus stopwords.
std::vector<std::string> content_tokens(const std::string& raw,
                                        const std::unordered_set<std::string>& stopwords);

// Lowercase + punctuation-strip + whitespace split + stopword removal, mapped
// through the vocabulary (OOV -> unk), truncated to max_len, right-padded with
// the pad index up to min_len. A text that is empty after stopword removal
// yields a single unk token.
TokenSequence preprocess(const std::string& raw, const Vocabulary& vocab,
                         std::size_t max_len, std::size_t min_len = 1);

}  // namespace pge
