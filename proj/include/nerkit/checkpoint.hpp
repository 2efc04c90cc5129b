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

#ifndef NERKIT_CHECKPOINT_HPP_
#define NERKIT_CHECKPOINT_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "nerkit/model.hpp"
#include "nerkit/vocab.hpp"

namespace nerkit {

inline constexpr std::uint8_t kCheckpointVersion = 1;

// Self-contained model snapshot: everything prediction needs.
struct Checkpoint {
  ModelConfig config;
  Vocabulary vocab;
  std::vector<std::string> tags;  // 13 label strings in canonical id order
  ModelParams params;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Binary layout: magic "NERK", one version byte, little-endian u32 header
// length, a JSON header (config, vocabulary, tag mapping), then every
// tensor in declaration order as little-endian float32, row-major.
// Serialization is byte-deterministic for equal checkpoints.
std::string serialize_checkpoint(const Checkpoint& ckpt);

// Throws CheckpointError on bad magic, version mismatch (the message names
// both versions), or a malformed/truncated payload.
Checkpoint parse_checkpoint(const std::string& bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace nerkit

#endif  // NERKIT_CHECKPOINT_HPP_
