#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "pathllm/textualize.hpp"

namespace pathllm {

using TokenId = std::int32_t;

struct Vocab {
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kUnk = 1;
  static constexpr TokenId kBos = 2;
  static constexpr TokenId kEos = 3;

  std::vector<std::string> id_to_token;
  std::unordered_map<std::string, TokenId> token_to_id;

  std::size_t size() const { return id_to_token.size(); }
  TokenId lookup(const std::string& token) const;  // closed vocab: UNK if absent
};

struct RawToken {
  std::string text;   // lowercased
  std::size_t begin;  // char span in the source string, [begin, end)
  std::size_t end;
};

// Lowercased maximal alphanumeric runs (bytes >= 0x80 count as word
// characters) plus single punctuation tokens; whitespace separates.
std::vector<RawToken> tokenize_text(const std::string& text);

// Specials first, then every distinct corpus token sorted lexicographically.
Vocab build_vocab(const std::vector<TextualizedPath>& corpus);

// BOS + token ids + EOS, truncated to max_len total positions.
std::vector<TokenId> encode(const Vocab& vocab, const std::string& text,
                            std::size_t max_len);

enum class TokenTag : std::uint8_t { Filler, Node, Edge };

struct EncodedText {
  std::vector<TokenId> ids;
  std::vector<TokenTag> tags;             // parallel to ids; BOS/EOS = Filler
  std::vector<std::uint32_t> span_index;  // node or edge ordinal; 0 for filler
};

// Tags each token by the span fully containing it: node span -> Node with
// the node ordinal, edge span -> Edge, everything else filler.
EncodedText encode_tagged(const Vocab& vocab, const TextualizedPath& entry,
                          std::size_t max_len);

void save_vocab(const Vocab& vocab, const std::string& path);  // token\tid
Vocab load_vocab(const std::string& path);

}  // namespace pathllm
