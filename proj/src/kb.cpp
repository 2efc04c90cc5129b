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

#include "nerkit/kb.hpp"

#include <algorithm>
#include <stdexcept>

#include "nerkit/corpus.hpp"
#include "nerkit/vocab.hpp"

namespace nerkit {

namespace {

std::vector<std::string> split_ws(const std::string& text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < text.size() && text[i] != ' ' && text[i] != '\t') ++i;
    if (i > start) out.push_back(text.substr(start, i - start));
  }
  return out;
}

std::vector<std::string> split_on(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == sep) {
      out.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

void insert_sorted_unique(std::vector<std::string>& v, const std::string& s) {
  const auto it = std::lower_bound(v.begin(), v.end(), s);
  if (it == v.end() || *it != s) {
    v.insert(it, s);
  }
}

}  // namespace

std::string KnowledgeBase::normalize_surface(
    const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += ascii_lower(tokens[i]);
  }
  return out;
}

KnowledgeBase KnowledgeBase::from_entities(std::vector<KbEntity> entities) {
  KnowledgeBase kb;
  for (KbEntity& e : entities) {
    if (e.id.empty()) {
      throw std::invalid_argument("entity id must not be empty");
    }
    if (e.canonical_name.empty()) {
      throw std::invalid_argument("entity " + e.id +
                                  " has an empty canonical name");
    }
    if (e.entity_type.empty()) {
      throw std::invalid_argument("entity " + e.id + " has an empty type");
    }
    const std::string id = e.id;
    if (!kb.entities_.emplace(id, std::move(e)).second) {
      throw std::invalid_argument("duplicate entity id " + id);
    }
  }
  for (const auto& [id, e] : kb.entities_) {
    insert_sorted_unique(kb.surface_index_[normalize_surface(e.canonical_name)],
                         id);
    for (const auto& alias : e.aliases) {
      insert_sorted_unique(kb.surface_index_[normalize_surface(alias)], id);
    }
    insert_sorted_unique(kb.type_index_[e.entity_type], id);
  }
  return kb;
}

KnowledgeBase KnowledgeBase::load(const std::string& text) {
  std::vector<KbEntity> entities;
  std::set<std::string> seen_ids;
  std::size_t line_no = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i != text.size() && text[i] != '\n') continue;
    std::string line = text.substr(start, i - start);
    start = i + 1;
    if (i == text.size() && line.empty()) break;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (split_ws(line).empty()) continue;

    const std::vector<std::string> fields = split_on(line, '\t');
    if (fields.size() < 3 || fields.size() > 4) {
      throw ParseError("malformed knowledge-base line (want "
                       "id<TAB>name<TAB>type[<TAB>aliases], got " +
                       std::to_string(fields.size()) + " fields)",
                       line_no);
    }
    KbEntity e;
    e.id = fields[0];
    e.canonical_name = split_ws(fields[1]);
    e.entity_type = fields[2];
    if (e.id.empty() || e.canonical_name.empty() || e.entity_type.empty()) {
      throw ParseError("malformed knowledge-base line (empty id, name or "
                       "type)",
                       line_no);
    }
    if (!seen_ids.insert(e.id).second) {
      throw ParseError("duplicate entity id " + e.id, line_no);
    }
    if (fields.size() == 4) {
      for (const std::string& alias : split_on(fields[3], '|')) {
        std::vector<std::string> tokens = split_ws(alias);
        if (!tokens.empty()) {
          e.aliases.push_back(std::move(tokens));
        }
      }
    }
    entities.push_back(std::move(e));
  }
  try {
    return from_entities(std::move(entities));
  } catch (const std::invalid_argument& e) {
    // Re-scan for the offending line so the report carries a line number.
    throw ParseError(e.what(), 0);
  }
}

KnowledgeBase KnowledgeBase::load_file(const std::string& path) {
  return load(read_text_file(path));
}

const KbEntity* KnowledgeBase::find(const std::string& id) const {
  const auto it = entities_.find(id);
  return it == entities_.end() ? nullptr : &it->second;
}

std::optional<std::string> KnowledgeBase::link(
    const std::vector<std::string>& mention_tokens) const {
  if (mention_tokens.empty()) {
    throw std::invalid_argument("mention must not be empty");
  }
  const auto it = surface_index_.find(normalize_surface(mention_tokens));
  if (it == surface_index_.end()) {
    return std::nullopt;
  }
  return it->second.front();  // ids are kept sorted; smallest wins
}

std::vector<std::string> KnowledgeBase::same_type_candidates(
    const std::string& id) const {
  const KbEntity* entity = find(id);
  if (entity == nullptr) {
    throw std::invalid_argument("unknown entity id " + id);
  }
  std::vector<std::string> out;
  const auto it = type_index_.find(entity->entity_type);
  if (it != type_index_.end()) {
    for (const std::string& candidate : it->second) {
      if (candidate != id) {
        out.push_back(candidate);
      }
    }
  }
  return out;
}

}  // namespace nerkit
