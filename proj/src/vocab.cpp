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

#include "nerkit/vocab.hpp"

#include <set>
#include <stdexcept>

namespace nerkit {

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') {
      c = static_cast<char>(c - 'A' + 'a');
    }
  }
  return out;
}

Vocabulary Vocabulary::build(const Corpus& corpus) {
  std::set<std::string> words;
  for (const Sentence& s : corpus.sentences) {
    for (const std::string& token : s.tokens) {
      std::string lower = ascii_lower(token);
      if (lower == kPadToken || lower == kUnkToken) {
        continue;  // reserved entries keep their fixed ids
      }
      words.insert(std::move(lower));
    }
  }
  std::vector<std::string> tokens;
  tokens.reserve(words.size() + 2);
  tokens.emplace_back(kPadToken);
  tokens.emplace_back(kUnkToken);
  tokens.insert(tokens.end(), words.begin(), words.end());
  return from_tokens(std::move(tokens));
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  if (tokens.size() < 2 || tokens[0] != kPadToken || tokens[1] != kUnkToken) {
    throw std::invalid_argument(
        "vocabulary must start with the reserved <pad> and <unk> entries");
  }
  Vocabulary vocab;
  vocab.tokens_ = std::move(tokens);
  vocab.index_.reserve(vocab.tokens_.size());
  for (std::size_t i = 0; i < vocab.tokens_.size(); ++i) {
    if (!vocab.index_.emplace(vocab.tokens_[i], static_cast<int>(i)).second) {
      throw std::invalid_argument("duplicate vocabulary token '" +
                                  vocab.tokens_[i] + "'");
    }
  }
  return vocab;
}

int Vocabulary::id_of(std::string_view token) const {
  const auto it = index_.find(ascii_lower(token));
  return it == index_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::token_of(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw std::out_of_range("vocabulary id out of range: " +
                            std::to_string(id));
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<int> Vocabulary::encode(
    const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const std::string& token : tokens) {
    ids.push_back(id_of(token));
  }
  return ids;
}

}  // namespace nerkit
