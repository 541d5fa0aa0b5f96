// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include "xlt/encoder/encoder.hpp"
#include "xlt/encoder/tokenizer.hpp"

namespace xlt::enc {

struct Checkpoint {
  TokenizerSpec tokenizer;
  EncoderParams params;
};

/// JSON document with config, vocabulary and every parameter array.
/// Doubles are written with round-trip precision.
std::string checkpoint_to_json(const TokenizerSpec& tokenizer, const EncoderParams& params);
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const TokenizerSpec& tokenizer,
                     const EncoderParams& params);
/// Throws LoadError on a missing or malformed file.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace xlt::enc
