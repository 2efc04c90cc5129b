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

#include "nerkit/bio.hpp"

#include <algorithm>
#include <stdexcept>

namespace nerkit {

namespace {

constexpr std::array<std::string_view, kNumClasses> kClassNames = {
    "PER", "LOC", "GRP", "CORP", "PROD", "CW"};

}  // namespace

std::string_view class_name(EntityClass c) {
  return kClassNames[static_cast<std::size_t>(c)];
}

EntityClass class_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    if (kClassNames[i] == name) {
      return static_cast<EntityClass>(i);
    }
  }
  throw std::invalid_argument("unknown entity class " + std::string(name));
}

BioTag BioTag::from_id(int id) {
  if (id < 0 || id >= static_cast<int>(kNumLabels)) {
    throw std::invalid_argument("tag id out of range: " + std::to_string(id));
  }
  return BioTag(id);
}

BioTag BioTag::from_string(std::string_view s) {
  if (s == "O") {
    return outside();
  }
  if (s.size() >= 3 && (s[0] == 'B' || s[0] == 'I') && s[1] == '-') {
    for (std::size_t i = 0; i < kNumClasses; ++i) {
      if (s.substr(2) == kClassNames[i]) {
        const auto cls = static_cast<EntityClass>(i);
        return s[0] == 'B' ? begin(cls) : inside(cls);
      }
    }
  }
  throw std::invalid_argument("unknown tag " + std::string(s));
}

EntityClass BioTag::entity_class() const {
  if (id_ == 0) {
    throw std::logic_error("the O tag has no entity class");
  }
  return static_cast<EntityClass>((id_ - 1) / 2);
}

std::string BioTag::to_string() const {
  if (id_ == 0) {
    return "O";
  }
  return std::string(is_begin() ? "B-" : "I-") +
         std::string(class_name(entity_class()));
}

const std::array<std::string, kNumLabels>& tag_names() {
  static const std::array<std::string, kNumLabels> names = [] {
    std::array<std::string, kNumLabels> out;
    for (std::size_t i = 0; i < kNumLabels; ++i) {
      out[i] = BioTag::from_id(static_cast<int>(i)).to_string();
    }
    return out;
  }();
  return names;
}

std::vector<std::size_t> validate_bio(const std::vector<BioTag>& tags) {
  std::vector<std::size_t> violations;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (!tags[i].is_inside()) {
      continue;
    }
    const bool continues =
        i > 0 && !tags[i - 1].is_outside() &&
        tags[i - 1].entity_class() == tags[i].entity_class();
    if (!continues) {
      violations.push_back(i);
    }
  }
  return violations;
}

std::vector<BioTag> repair_bio(const std::vector<BioTag>& tags) {
  std::vector<BioTag> repaired = tags;
  for (std::size_t i : validate_bio(tags)) {
    repaired[i] = BioTag::begin(tags[i].entity_class());
  }
  return repaired;
}

std::vector<EntitySpan> tags_to_spans(const std::vector<BioTag>& tags) {
  if (const auto violations = validate_bio(tags); !violations.empty()) {
    throw std::invalid_argument("invalid BIO sequence at index " +
                                std::to_string(violations.front()));
  }
  std::vector<EntitySpan> spans;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (!tags[i].is_begin()) {
      continue;
    }
    const EntityClass cls = tags[i].entity_class();
    std::size_t end = i + 1;
    while (end < tags.size() && tags[end].is_inside() &&
           tags[end].entity_class() == cls) {
      ++end;
    }
    spans.push_back({i, end, cls});
    i = end - 1;
  }
  return spans;
}

std::vector<BioTag> spans_to_tags(const std::vector<EntitySpan>& spans,
                                  std::size_t n) {
  std::vector<EntitySpan> sorted = spans;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const EntitySpan& sp = sorted[i];
    if (sp.start >= sp.end || sp.end > n) {
      throw std::invalid_argument("span out of range: [" +
                                  std::to_string(sp.start) + ", " +
                                  std::to_string(sp.end) + ") with n " +
                                  std::to_string(n));
    }
    if (i > 0 && sorted[i - 1].end > sp.start) {
      throw std::invalid_argument("overlapping spans at token " +
                                  std::to_string(sp.start));
    }
  }
  std::vector<BioTag> tags(n, BioTag::outside());
  for (const EntitySpan& sp : sorted) {
    tags[sp.start] = BioTag::begin(sp.cls);
    for (std::size_t i = sp.start + 1; i < sp.end; ++i) {
      tags[i] = BioTag::inside(sp.cls);
    }
  }
  return tags;
}

}  // namespace nerkit
