#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vgkit {

using TokenSequence = std::vector<std::size_t>;

// Dense token index. Index 0 is padding and index 1 is the out-of-vocabulary
// bucket; both are stable across save/load.
class Vocabulary {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kOov = 1;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kOovToken = "<unk>";

  Vocabulary();
  // Tokens after the two reserved entries, in index order.
  explicit Vocabulary(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  std::size_t index_of(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(std::size_t index) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

  // One token per line; line number is the index.
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Tokens with count >= min_freq, ordered by descending frequency and then
// lexicographically. Throws on an empty corpus.
Vocabulary build_vocab(const std::vector<std::vector<std::string>>& corpus, std::size_t min_freq = 1);

// Lowercases and splits on whitespace.
std::vector<std::string> split_words(std::string_view phrase);

// Throws std::invalid_argument for an empty or whitespace-only phrase.
TokenSequence tokenize(std::string_view phrase, const Vocabulary& vocab);
TokenSequence tokenize(const std::vector<std::string>& words, const Vocabulary& vocab);

}  // namespace vgkit
