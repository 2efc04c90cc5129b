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

#ifndef NERKIT_KB_HPP_
#define NERKIT_KB_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nerkit {

// One gazetteer record. The type id is free-form (one type per entity);
// aliases are alternative surface forms, each a token list like the
// canonical name.
struct KbEntity {
  std::string id;
  std::vector<std::string> canonical_name;
  std::string entity_type;
  std::vector<std::vector<std::string>> aliases;
};

// Local entity gazetteer with surface-form and type indexes. Immutable
// after construction; safe to share across threads.
//
// Text format, one entity per line:
//   id<TAB>canonical name<TAB>type<TAB>alias one|alias two
// The alias column is optional; '#' lines are comments. Names and aliases
// are whitespace-tokenized; surface lookup normalizes to lowercase with
// single-space joins.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;

  static KnowledgeBase load(const std::string& text);           // ParseError
  static KnowledgeBase load_file(const std::string& path);
  static KnowledgeBase from_entities(std::vector<KbEntity> entities);

  static std::string normalize_surface(const std::vector<std::string>& tokens);

  std::size_t size() const { return entities_.size(); }
  const KbEntity* find(const std::string& id) const;  // nullptr when absent

  // Exact normalized surface-form match. Several entities may share a
  // surface; the lexicographically smallest id wins.
  std::optional<std::string> link(
      const std::vector<std::string>& mention_tokens) const;

  // All ids sharing the entity's type, excluding the entity itself, sorted
  // by id. Throws std::invalid_argument on an unknown id.
  std::vector<std::string> same_type_candidates(const std::string& id) const;

  const std::map<std::string, KbEntity>& entities() const { return entities_; }
  const std::map<std::string, std::vector<std::string>>& surface_index() const {
    return surface_index_;
  }
  const std::map<std::string, std::vector<std::string>>& type_index() const {
    return type_index_;
  }

 private:
  std::map<std::string, KbEntity> entities_;
  std::map<std::string, std::vector<std::string>> surface_index_;  // sorted ids
  std::map<std::string, std::vector<std::string>> type_index_;     // sorted ids
};

}  // namespace nerkit

#endif  // NERKIT_KB_HPP_
