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

#ifndef NERKIT_BIO_HPP_
#define NERKIT_BIO_HPP_

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nerkit {

// The six entity classes of the closed label set.
enum class EntityClass : std::uint8_t { PER = 0, LOC, GRP, CORP, PROD, CW };

inline constexpr std::size_t kNumClasses = 6;
inline constexpr std::size_t kNumLabels = 13;  // O plus a B/I pair per class

inline constexpr std::array<EntityClass, kNumClasses> kAllClasses = {
    EntityClass::PER,  EntityClass::LOC,  EntityClass::GRP,
    EntityClass::CORP, EntityClass::PROD, EntityClass::CW};

std::string_view class_name(EntityClass c);
EntityClass class_from_name(std::string_view name);  // throws invalid_argument

// One of the 13 BIO labels: O, or {B,I}-<class>. Construction is closed;
// any other string or id is rejected. Integer ids are canonical and stable
// so that checkpoints and confusion matrices line up across runs:
// O=0, B-PER=1, I-PER=2, B-LOC=3, I-LOC=4, B-GRP=5, I-GRP=6, B-CORP=7,
// I-CORP=8, B-PROD=9, I-PROD=10, B-CW=11, I-CW=12.
class BioTag {
 public:
  BioTag() = default;  // O

  static BioTag outside() { return BioTag(0); }
  static BioTag begin(EntityClass c) {
    return BioTag(1 + 2 * static_cast<int>(c));
  }
  static BioTag inside(EntityClass c) {
    return BioTag(2 + 2 * static_cast<int>(c));
  }
  static BioTag from_id(int id);                  // throws invalid_argument
  static BioTag from_string(std::string_view s);  // throws invalid_argument

  int id() const { return id_; }
  bool is_outside() const { return id_ == 0; }
  bool is_begin() const { return id_ != 0 && id_ % 2 == 1; }
  bool is_inside() const { return id_ != 0 && id_ % 2 == 0; }
  EntityClass entity_class() const;  // throws std::logic_error on O
  std::string to_string() const;

  auto operator<=>(const BioTag&) const = default;

 private:
  explicit BioTag(int id) : id_(static_cast<std::uint8_t>(id)) {}
  std::uint8_t id_ = 0;
};

// All 13 tag strings in canonical id order.
const std::array<std::string, kNumLabels>& tag_names();

// Maximal B-X (I-X)* run: token range [start, end), end exclusive.
struct EntitySpan {
  std::size_t start = 0;
  std::size_t end = 0;
  EntityClass cls = EntityClass::PER;

  auto operator<=>(const EntitySpan&) const = default;
};

// Indices where an I-X tag is not immediately preceded by B-X or I-X of the
// same class. An empty result means the sequence is BIO-valid.
std::vector<std::size_t> validate_bio(const std::vector<BioTag>& tags);

// Rewrites every violating I-X to B-X. Idempotent; identity on valid input;
// output always passes validate_bio.
std::vector<BioTag> repair_bio(const std::vector<BioTag>& tags);

// Decodes maximal B-X (I-X)* runs into spans, in start order. The input must
// be BIO-valid (throws std::invalid_argument otherwise); spans are pairwise
// disjoint by construction.
std::vector<EntitySpan> tags_to_spans(const std::vector<BioTag>& tags);

// Inverse of tags_to_spans. Spans must be pairwise disjoint and lie within
// [0, n); throws std::invalid_argument otherwise. Adjacent spans of the same
// class stay distinct (the second one starts with B).
std::vector<BioTag> spans_to_tags(const std::vector<EntitySpan>& spans,
                                  std::size_t n);

}  // namespace nerkit

#endif  // NERKIT_BIO_HPP_
