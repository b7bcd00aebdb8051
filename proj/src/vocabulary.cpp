#include "pge/vocabulary.hpp"

#include <cctype>
#include <fstream>

#include "pge/errors.hpp"

namespace pge {

Vocabulary::Vocabulary() : Vocabulary(std::unordered_set<std::string>{}) {}

Vocabulary::Vocabulary(std::unordered_set<std::string> stopwords)
    : stopwords_(std::move(stopwords)) {
  index_to_token_ = {"<pad>", "<unk>"};
  token_to_index_ = {{"<pad>", kPadIndex}, {"<unk>", kUnkIndex}};
}

std::int32_t Vocabulary::add(const std::string& token) {
  auto it = token_to_index_.find(token);
  if (it != token_to_index_.end()) return it->second;
  const auto index = static_cast<std::int32_t>(index_to_token_.size());
  token_to_index_.emplace(token, index);
  index_to_token_.push_back(token);
  return index;
}

std::int32_t Vocabulary::lookup(const std::string& token) const {
  auto it = token_to_index_.find(token);
  return it == token_to_index_.end() ? kUnkIndex : it->second;
}

bool Vocabulary::contains(const std::string& token) const {
  return token_to_index_.count(token) > 0;
}

std::unordered_set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stopword file: " + path);
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) words.insert(line);
  }
  return words;
}

std::vector<std::string> tokenize(const std::string& raw) {
  std::string cleaned;
  cleaned.reserve(raw.size());
  for (unsigned char c : raw) {
    if (std::ispunct(c)) {
      cleaned.push_back(' ');
    } else {
      cleaned.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < cleaned.size()) {
    while (i < cleaned.size() && std::isspace(static_cast<unsigned char>(cleaned[i]))) ++i;
    std::size_t start = i;
    while (i < cleaned.size() && !std::isspace(static_cast<unsigned char>(cleaned[i]))) ++i;
    if (i > start) tokens.push_back(cleaned.substr(start, i - start));
  }
  return tokens;
}

std::vector<std::string> content_tokens(const std::string& raw,
                                        const std::unordered_set<std::string>& stopwords) {
  std::vector<std::string> out;
  for (auto& tok : tokenize(raw)) {
    if (stopwords.count(tok) == 0) out.push_back(std::move(tok));
  }
  return out;
}

TokenSequence preprocess(const std::string& raw, const Vocabulary& vocab,
                         std::size_t max_len, std::size_t min_len) {
  TokenSequence seq;
  for (const auto& tok : content_tokens(raw, vocab.stopwords())) {
    if (seq.size() >= max_len) break;
    seq.push_back(vocab.lookup(tok));
  }
  if (seq.empty()) seq.push_back(Vocabulary::kUnkIndex);
  while (seq.size() < min_len) seq.push_back(Vocabulary::kPadIndex);
  return seq;
}

}  // namespace pge
