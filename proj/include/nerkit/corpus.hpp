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

#ifndef NERKIT_CORPUS_HPP_
#define NERKIT_CORPUS_HPP_

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nerkit/bio.hpp"

namespace nerkit {

// One pre-tokenized sentence. Tokens are never re-tokenized; tags, when
// present, parallel the tokens one-to-one.
struct Sentence {
  std::optional<std::string> id;
  std::vector<std::string> tokens;
  std::optional<std::vector<BioTag>> tags;

  bool tagged() const { return tags.has_value(); }
  std::size_t size() const { return tokens.size(); }

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

// Order-preserving sentence collection.
struct Corpus {
  std::vector<Sentence> sentences;

  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

// Raised by the text parsers; line numbers are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : std::runtime_error(message + " at line " + std::to_string(line)),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Enforces the Sentence invariants: at least one token; no empty token; no
// token containing whitespace or starting with '#' (either would not survive
// serialization); tag count equals token count when tags are present.
// Throws std::invalid_argument.
void validate_sentence(const Sentence& s);

// Column-format corpus text. Sentences are separated by one or more blank
// lines. Lines starting with '#' are comments; the first comment of a
// sentence may carry `id <value>`, which becomes the sentence id. Token
// lines are split on whitespace runs: first field is the token, last field
// (when there are at least two) is the tag. Tagged and untagged lines must
// not mix within one sentence.
Corpus parse_conll(const std::string& text);

// Per-sentence 1-based source line of every token, for reports that must
// cite line numbers.
struct CorpusLayout {
  std::vector<std::vector<std::size_t>> token_lines;
};

std::pair<Corpus, CorpusLayout> parse_conll_with_lines(const std::string& text);

// Canonical form: `# id <id>` when the id is present, one `token<TAB>tag`
// line per token (token only for untagged sentences), one blank line after
// every sentence, LF endings. parse_conll(serialize_conll(c)) == c.
std::string serialize_conll(const Corpus& corpus);

// File wrappers; throw std::runtime_error on I/O failure.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
Corpus read_conll_file(const std::string& path);
void write_conll_file(const Corpus& corpus, const std::string& path);

}  // namespace nerkit

#endif  // NERKIT_CORPUS_HPP_
