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

#include "rnnlab/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

namespace rnnlab {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' ||
         c == '\r';
}

// Length of the UTF-8 sequence starting at s[i], or 0 if it is malformed
// (bad lead byte, truncated, overlong, surrogate, or above U+10FFFF).
std::size_t utf8_sequence_length(std::string_view s, std::size_t i) {
  const auto byte = [&](std::size_t k) {
    return static_cast<unsigned char>(s[k]);
  };
  const unsigned char lead = byte(i);
  std::size_t len = 0;
  std::uint32_t cp = 0;
  if (lead < 0x80) return 1;
  if ((lead & 0xE0) == 0xC0) {
    len = 2;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    len = 3;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    len = 4;
    cp = lead & 0x07;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    if ((byte(i + k) & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (byte(i + k) & 0x3F);
  }
  static constexpr std::uint32_t kMinForLength[5] = {0, 0, 0x80, 0x800,
                                                     0x10000};
  if (cp < kMinForLength[len]) return 0;
  if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  return len;
}

}  // namespace

TokenMode parse_token_mode(std::string_view text) {
  if (text == "word") return TokenMode::kWord;
  if (text == "char") return TokenMode::kChar;
  throw ConfigError("tokenization mode must be \"word\" or \"char\", got \"" +
                    std::string(text) + "\"");
}

std::string to_string(TokenMode mode) {
  return mode == TokenMode::kWord ? "word" : "char";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return text;
}

std::vector<std::string> tokenize_line(std::string_view line, TokenMode mode) {
  std::vector<std::string> out;
  if (mode == TokenMode::kWord) {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && is_space(line[i])) ++i;
      const std::size_t start = i;
      while (i < line.size() && !is_space(line[i])) ++i;
      if (i > start) out.emplace_back(line.substr(start, i - start));
    }
    return out;
  }
  for (std::size_t i = 0; i < line.size();) {
    const std::size_t len = utf8_sequence_length(line, i);
    if (len == 0) {
      throw DataError("invalid UTF-8 at byte " + std::to_string(i) +
                      " of line \"" + std::string(line.substr(0, 40)) + "\"");
    }
    out.emplace_back(line.substr(i, len));
    i += len;
  }
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    while (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (std::any_of(line.begin(), line.end(),
                    [](char c) { return !is_space(c); })) {
      lines.push_back(line);
    }
    start = end + 1;
  }
  return lines;
}

Vocabulary::Vocabulary() : tokens_{"<unk>", "<eos>"} {
  ids_.emplace(tokens_[0], kUnk);
  ids_.emplace(tokens_[1], kEos);
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
  Vocabulary v;
  for (const auto& t : tokens) {
    const auto id = static_cast<std::int32_t>(v.tokens_.size());
    if (!v.ids_.emplace(t, id).second) {
      throw DataError("duplicate vocabulary entry \"" + t + "\"");
    }
    v.tokens_.push_back(t);
  }
  return v;
}

std::int32_t Vocabulary::id(std::string_view token) const {
  const auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(std::int32_t id) const {
  if (id < 0 || id >= static_cast<std::int32_t>(tokens_.size())) {
    throw IndexError("token id " + std::to_string(id) + " outside [0, " +
                     std::to_string(tokens_.size()) + ")");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

Vocabulary build_vocab(std::string_view corpus, TokenMode mode,
                       Index max_size) {
  if (max_size < 3) {
    throw ConfigError("max vocabulary size must be at least 3, got " +
                      std::to_string(max_size));
  }
  std::map<std::string, std::int64_t> counts;
  for (const auto line : split_lines(corpus)) {
    for (auto& t : tokenize_line(line, mode)) ++counts[std::move(t)];
  }
  if (counts.empty()) throw DataError("corpus contains no tokens");

  std::vector<std::pair<std::string, std::int64_t>> ranked(counts.begin(),
                                                           counts.end());
  // std::map iteration is already in byte order, so a stable sort on count
  // alone gives the lexicographic tie-break.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  const auto keep = std::min<std::size_t>(ranked.size(),
                                          static_cast<std::size_t>(max_size - 2));
  std::vector<std::string> kept;
  kept.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) kept.push_back(ranked[i].first);
  return Vocabulary::from_tokens(kept);
}

std::vector<std::int32_t> encode_line(const Vocabulary& vocab,
                                      std::string_view line, TokenMode mode) {
  std::vector<std::int32_t> ids;
  for (const auto& t : tokenize_line(line, mode)) ids.push_back(vocab.id(t));
  return ids;
}

CorpusSplit split_heldout(std::string_view corpus, double fraction) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw ConfigError("held-out fraction must lie in [0, 1)");
  }
  const std::vector<std::string_view> lines = split_lines(corpus);
  if (lines.empty()) throw DataError("corpus contains no lines");
  auto held = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(lines.size())));
  held = std::min(held, lines.size() - 1);
  CorpusSplit split;
  split.train.assign(lines.begin(), lines.end() - static_cast<long>(held));
  split.heldout.assign(lines.end() - static_cast<long>(held), lines.end());
  return split;
}

std::vector<std::int32_t> encode_stream(
    const Vocabulary& vocab, const std::vector<std::string_view>& lines,
    TokenMode mode) {
  std::vector<std::int32_t> stream;
  for (const auto line : lines) {
    const auto ids = encode_line(vocab, line, mode);
    stream.insert(stream.end(), ids.begin(), ids.end());
    stream.push_back(Vocabulary::kEos);
  }
  return stream;
}

StreamBatcher::StreamBatcher(std::vector<std::int32_t> stream, Index batch,
                             Index unroll)
    : stream_(std::move(stream)), batch_(batch), unroll_(unroll) {
  if (batch_ < 1 || unroll_ < 1) {
    throw ConfigError("batcher needs batch >= 1 and unroll >= 1");
  }
  segment_ = static_cast<Index>(stream_.size()) / batch_;
  if (segment_ < unroll_ + 1) {
    std::ostringstream msg;
    msg << "training stream of " << stream_.size() << " tokens is too short for "
        << batch_ << " streams of " << unroll_ + 1 << " tokens";
    throw DataError(msg.str());
  }
}

StreamBatcher::Window StreamBatcher::next() {
  Window w;
  if (cursor_ + unroll_ + 1 > segment_) {
    cursor_ = 0;
    w.reset = true;
  }
  w.batch.tokens.resize(batch_, unroll_ + 1);
  for (Index b = 0; b < batch_; ++b) {
    const std::int32_t* src = stream_.data() + b * segment_ + cursor_;
    std::copy(src, src + unroll_ + 1, w.batch.tokens.row(b).data());
  }
  cursor_ += unroll_;
  return w;
}

void StreamBatcher::seek(Index cursor) {
  if (cursor < 0 || cursor > segment_) {
    throw IndexError("batcher cursor " + std::to_string(cursor) +
                     " outside [0, " + std::to_string(segment_) + "]");
  }
  cursor_ = cursor;
}

}  // namespace rnnlab
