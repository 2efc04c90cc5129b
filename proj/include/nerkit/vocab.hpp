// Copyright 2026 The nerkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NERKIT_VOCAB_HPP_
#define NERKIT_VOCAB_HPP_

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nerkit/corpus.hpp"

namespace nerkit {

// ASCII lowercasing; bytes outside A-Z pass through, so UTF-8 is untouched.
std::string ascii_lower(std::string_view s);

// Word-level vocabulary: lowercased unique training tokens in sorted order,
// preceded by the reserved <pad> (id 0) and <unk> (id 1) entries. Unseen
// tokens map to <unk>. Build order is deterministic for a given corpus.
class Vocabulary {
 public:
  static constexpr int kPadId = 0;
  static constexpr int kUnkId = 1;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocabulary() = default;

  static Vocabulary build(const Corpus& corpus);

  // Reconstructs a vocabulary from tokens in id order (checkpoint load);
  // the first two entries must be the reserved ones. Throws on duplicates.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  // Lowercased lookup; kUnkId when absent.
  int id_of(std::string_view token) const;
  const std::string& token_of(int id) const;  // throws std::out_of_range

  std::vector<int> encode(const std::vector<std::string>& tokens) const;

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace nerkit

#endif  // NERKIT_VOCAB_HPP_
