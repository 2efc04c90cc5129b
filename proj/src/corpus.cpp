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

#include "nerkit/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace nerkit {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), is_space);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) {
      fields.push_back(line.substr(start, i - start));
    }
  }
  return fields;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '\n') {
      std::string line = text.substr(start, i - start);
      if (!line.empty() && line.back() == '\r') {
        line.pop_back();
      }
      lines.push_back(std::move(line));
      start = i + 1;
    }
  }
  // A trailing newline does not open an extra empty line.
  if (!lines.empty() && lines.back().empty() && !text.empty() &&
      text.back() == '\n') {
    lines.pop_back();
  }
  return lines;
}

// `id <value>` inside the first comment line of a sentence; tolerates an
// `=` between key and value.
std::optional<std::string> extract_id(const std::string& comment) {
  const std::vector<std::string> fields = split_fields(comment.substr(1));
  for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
    if (fields[i] == "id") {
      const std::string& next = fields[i + 1];
      if (next != "=") {
        return next;
      }
      if (i + 2 < fields.size()) {
        return fields[i + 2];
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

struct SentenceBuilder {
  Sentence sentence;
  std::vector<std::size_t> token_lines;
  bool saw_comment = false;
  bool saw_tagged = false;
  bool saw_untagged = false;

  bool has_tokens() const { return !sentence.tokens.empty(); }
};

}  // namespace

void validate_sentence(const Sentence& s) {
  if (s.tokens.empty()) {
    throw std::invalid_argument("sentence has no tokens");
  }
  for (const std::string& token : s.tokens) {
    if (token.empty()) {
      throw std::invalid_argument("empty token");
    }
    if (std::any_of(token.begin(), token.end(), is_space) ||
        token.find('\n') != std::string::npos) {
      throw std::invalid_argument("token contains whitespace: '" + token +
                                  "'");
    }
    if (token.front() == '#') {
      throw std::invalid_argument(
          "token starts with '#' and would parse back as a comment: '" +
          token + "'");
    }
  }
  if (s.tags && s.tags->size() != s.tokens.size()) {
    throw std::invalid_argument("tag count " + std::to_string(s.tags->size()) +
                                " does not match token count " +
                                std::to_string(s.tokens.size()));
  }
}

std::pair<Corpus, CorpusLayout> parse_conll_with_lines(const std::string& text) {
  Corpus corpus;
  CorpusLayout layout;
  SentenceBuilder current;

  auto flush = [&] {
    if (!current.has_tokens()) {
      current = SentenceBuilder{};
      return;
    }
    validate_sentence(current.sentence);
    corpus.sentences.push_back(std::move(current.sentence));
    layout.token_lines.push_back(std::move(current.token_lines));
    current = SentenceBuilder{};
  };

  const std::vector<std::string> lines = split_lines(text);
  for (std::size_t idx = 0; idx < lines.size(); ++idx) {
    const std::string& line = lines[idx];
    const std::size_t line_no = idx + 1;
    if (is_blank(line)) {
      flush();
      continue;
    }
    if (line.front() == '#') {
      if (!current.saw_comment) {
        current.saw_comment = true;
        current.sentence.id = extract_id(line);
      }
      continue;
    }
    const std::vector<std::string> fields = split_fields(line);
    if (fields.empty()) {
      continue;  // unreachable: blank lines are handled above
    }
    const bool tagged = fields.size() >= 2;
    if (tagged && current.saw_untagged) {
      throw ParseError("mixed tagged and untagged tokens within a sentence",
                       line_no);
    }
    if (!tagged && current.saw_tagged) {
      throw ParseError("mixed tagged and untagged tokens within a sentence",
                       line_no);
    }
    current.sentence.tokens.push_back(fields.front());
    current.token_lines.push_back(line_no);
    if (tagged) {
      current.saw_tagged = true;
      if (!current.sentence.tags) {
        current.sentence.tags.emplace();
      }
      try {
        current.sentence.tags->push_back(BioTag::from_string(fields.back()));
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), line_no);
      }
    } else {
      current.saw_untagged = true;
    }
  }
  flush();
  return {std::move(corpus), std::move(layout)};
}

Corpus parse_conll(const std::string& text) {
  return parse_conll_with_lines(text).first;
}

std::string serialize_conll(const Corpus& corpus) {
  std::string out;
  for (const Sentence& s : corpus.sentences) {
    validate_sentence(s);
    if (s.id) {
      out += "# id " + *s.id + "\n";
    }
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      out += s.tokens[i];
      if (s.tags) {
        out += '\t';
        out += (*s.tags)[i].to_string();
      }
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    throw std::runtime_error("failed reading " + path);
  }
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  out << text;
  out.flush();
  if (!out) {
    throw std::runtime_error("failed writing " + path);
  }
}

Corpus read_conll_file(const std::string& path) {
  return parse_conll(read_text_file(path));
}

void write_conll_file(const Corpus& corpus, const std::string& path) {
  write_text_file(path, serialize_conll(corpus));
}

}  // namespace nerkit
