// Copyright 2026 The rnn-factor-lab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Corpus ingestion: vocabulary construction, line encoding, the held-out
// split, and the stream batcher used by the training loop.

#ifndef RNNLAB_CORPUS_HPP_
#define RNNLAB_CORPUS_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rnnlab/model.hpp"

namespace rnnlab {

enum class TokenMode { kWord, kChar };

TokenMode parse_token_mode(std::string_view text);  // "word" | "char"
std::string to_string(TokenMode mode);

/// Reads a whole file as bytes. IoError if it cannot be opened or read.
std::string read_text_file(const std::filesystem::path& path);

/// Splits one line into tokens: whitespace-separated words, or one token per
/// Unicode scalar value (each token is the UTF-8 encoding of that scalar).
/// Invalid UTF-8 raises DataError in char mode.
std::vector<std::string> tokenize_line(std::string_view line, TokenMode mode);

/// Newline-delimited lines with any trailing '\r' dropped. Lines holding only
/// whitespace are skipped.
std::vector<std::string_view> split_lines(std::string_view text);

class Vocabulary {
 public:
  static constexpr std::int32_t kUnk = 0;
  static constexpr std::int32_t kEos = 1;

  Vocabulary();

  // Ids 2.. follow `tokens` order. Duplicate or reserved entries are a
  // DataError.
  static Vocabulary from_tokens(const std::vector<std::string>& tokens);

  std::int32_t id(std::string_view token) const;  // kUnk when absent
  const std::string& token(std::int32_t id) const;
  Index size() const { return static_cast<Index>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  bool operator==(const Vocabulary& other) const {
    return tokens_ == other.tokens_;
  }

 private:
  std::vector<std::string> tokens_;  // id -> token; [0] "<unk>", [1] "<eos>"
  std::unordered_map<std::string, std::int32_t> ids_;
};

/// Counts tokens over all lines (plus one EOS per line) and keeps the
/// max_size - 2 most frequent, ties broken by byte-wise token order.
/// A corpus without any token is a DataError; max_size < 3 is a ConfigError.
Vocabulary build_vocab(std::string_view corpus, TokenMode mode,
                       Index max_size);

/// Tokens of one line mapped through the vocabulary (no EOS added).
std::vector<std::int32_t> encode_line(const Vocabulary& vocab,
                                      std::string_view line, TokenMode mode);

struct CorpusSplit {
  std::vector<std::string_view> train;
  std::vector<std::string_view> heldout;  // the last lines of the file
};

/// Holds out the last ceil(fraction * lines) lines (at least one line stays
/// in training). fraction must lie in [0, 1).
CorpusSplit split_heldout(std::string_view corpus, double fraction);

/// Training stream: each line's ids followed by EOS, concatenated in order.
std::vector<std::int32_t> encode_stream(const Vocabulary& vocab,
                                        const std::vector<std::string_view>& lines,
                                        TokenMode mode);

/// Cuts the stream into B contiguous segments of equal length and walks them
/// in lockstep with windows of T+1 tokens that overlap by one. When a segment
/// has no full window left the cursor wraps to 0 and the window is flagged as
/// a reset, so the caller zeroes the carried state.
class StreamBatcher {
 public:
  StreamBatcher(std::vector<std::int32_t> stream, Index batch, Index unroll);

  struct Window {
    BatchSequence batch;
    bool reset = false;  // state must be zeroed before this window
  };

  Window next();

  Index cursor() const { return cursor_; }
  // Restores a position previously read from cursor(). Range-checked.
  void seek(Index cursor);
  Index segment_length() const { return segment_; }

 private:
  std::vector<std::int32_t> stream_;
  Index batch_;
  Index unroll_;
  Index segment_;
  Index cursor_ = 0;
};

}  // namespace rnnlab

#endif  // RNNLAB_CORPUS_HPP_
