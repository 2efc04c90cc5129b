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

#include "nerkit/checkpoint.hpp"

#include <bit>
#include <cstring>

#include <json.hpp>

#include "nerkit/corpus.hpp"

namespace nerkit {

namespace {

constexpr char kMagic[4] = {'N', 'E', 'R', 'K'};

void append_u32le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void append_f32le(std::string& out, float f) {
  append_u32le(out, std::bit_cast<std::uint32_t>(f));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }

  std::uint32_t u32le() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
      v = (v << 8) | static_cast<std::uint8_t>(bytes_[pos_ + i]);
    }
    pos_ += 4;
    return v;
  }

  float f32le() { return std::bit_cast<float>(u32le()); }

  std::string take(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool exhausted() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) {
    if (pos_ + n > bytes_.size()) {
      throw CheckpointError("truncated checkpoint");
    }
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

nlohmann::json config_to_json(const ModelConfig& c) {
  return {{"vocab_size", c.vocab_size}, {"d_model", c.d_model},
          {"n_layers", c.n_layers},     {"n_heads", c.n_heads},
          {"d_ff", c.d_ff},             {"max_len", c.max_len},
          {"n_labels", c.n_labels},     {"seed", c.seed}};
}

ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.vocab_size = j.at("vocab_size").get<int>();
  c.d_model = j.at("d_model").get<int>();
  c.n_layers = j.at("n_layers").get<int>();
  c.n_heads = j.at("n_heads").get<int>();
  c.d_ff = j.at("d_ff").get<int>();
  c.max_len = j.at("max_len").get<int>();
  c.n_labels = j.at("n_labels").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  ckpt.config.validate();
  if (static_cast<int>(ckpt.vocab.size()) != ckpt.config.vocab_size) {
    throw CheckpointError("vocabulary size does not match the config");
  }
  if (ckpt.tags.size() != kNumLabels) {
    throw CheckpointError("tag mapping must list all 13 labels");
  }

  nlohmann::json header = {{"config", config_to_json(ckpt.config)},
                           {"vocab", ckpt.vocab.tokens()},
                           {"tags", ckpt.tags}};
  const std::string header_text = header.dump();

  std::string out;
  out.append(kMagic, sizeof(kMagic));
  out.push_back(static_cast<char>(kCheckpointVersion));
  append_u32le(out, static_cast<std::uint32_t>(header_text.size()));
  out += header_text;
  for (const auto& [name, tensor] : tensor_list(ckpt.params)) {
    for (Eigen::Index i = 0; i < tensor->rows(); ++i) {
      for (Eigen::Index j = 0; j < tensor->cols(); ++j) {
        append_f32le(out, static_cast<float>((*tensor)(i, j)));
      }
    }
  }
  return out;
}

Checkpoint parse_checkpoint(const std::string& bytes) {
  Reader reader(bytes);
  const std::string magic = reader.take(sizeof(kMagic));
  if (std::memcmp(magic.data(), kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError("not a checkpoint file (bad magic)");
  }
  const std::uint8_t version = reader.u8();
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint format version " +
                          std::to_string(version) + ", expected " +
                          std::to_string(kCheckpointVersion));
  }
  const std::uint32_t header_len = reader.u32le();
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(reader.take(header_len));
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint header: ") +
                          e.what());
  }

  Checkpoint ckpt;
  try {
    ckpt.config = config_from_json(header.at("config"));
    ckpt.vocab = Vocabulary::from_tokens(
        header.at("vocab").get<std::vector<std::string>>());
    ckpt.tags = header.at("tags").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint header: ") +
                          e.what());
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("malformed checkpoint header: ") +
                          e.what());
  }
  try {
    ckpt.config.validate();
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("invalid checkpoint config: ") +
                          e.what());
  }
  if (static_cast<int>(ckpt.vocab.size()) != ckpt.config.vocab_size) {
    throw CheckpointError("vocabulary size does not match the config");
  }
  if (ckpt.tags.size() != kNumLabels) {
    throw CheckpointError("tag mapping must list all 13 labels");
  }
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    if (ckpt.tags[i] != tag_names()[i]) {
      throw CheckpointError("checkpoint tag mapping differs from the "
                            "canonical label set at id " +
                            std::to_string(i));
    }
  }

  ckpt.params = zeros_params(ckpt.config);
  for (auto& [name, tensor] : tensor_list(ckpt.params)) {
    for (Eigen::Index i = 0; i < tensor->rows(); ++i) {
      for (Eigen::Index j = 0; j < tensor->cols(); ++j) {
        (*tensor)(i, j) = static_cast<double>(reader.f32le());
      }
    }
  }
  if (!reader.exhausted()) {
    throw CheckpointError("trailing bytes after the tensor payload");
  }
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  write_text_file(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::string& path) {
  try {
    return parse_checkpoint(read_text_file(path));
  } catch (const CheckpointError& e) {
    throw CheckpointError(path + ": " + e.what());
  }
}

}  // namespace nerkit
