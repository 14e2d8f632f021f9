#include "pathllm/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

#include "pathllm/io_util.hpp"

namespace pathllm {

TokenId Vocab::lookup(const std::string& token) const {
  auto it = token_to_id.find(token);
  return it == token_to_id.end() ? kUnk : it->second;
}

namespace {

bool is_word_char(unsigned char c) { return c >= 0x80 || std::isalnum(c); }

}  // namespace

std::vector<RawToken> tokenize_text(const std::string& text) {
  std::vector<RawToken> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    RawToken tok;
    tok.begin = i;
    if (is_word_char(c)) {
      while (i < text.size() &&
             is_word_char(static_cast<unsigned char>(text[i]))) {
        tok.text += static_cast<char>(
            std::tolower(static_cast<unsigned char>(text[i])));
        ++i;
      }
    } else {
      tok.text = text[i];
      ++i;
    }
    tok.end = i;
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

Vocab build_vocab(const std::vector<TextualizedPath>& corpus) {
  if (corpus.empty()) throw std::invalid_argument("empty corpus");
  std::set<std::string> distinct;
  for (const TextualizedPath& entry : corpus) {
    for (const RawToken& tok : tokenize_text(entry.text)) {
      distinct.insert(tok.text);
    }
  }
  Vocab vocab;
  vocab.id_to_token = {"<pad>", "<unk>", "<bos>", "<eos>"};
  for (const std::string& tok : distinct) vocab.id_to_token.push_back(tok);
  for (std::size_t i = 0; i < vocab.id_to_token.size(); ++i) {
    vocab.token_to_id.emplace(vocab.id_to_token[i], static_cast<TokenId>(i));
  }
  return vocab;
}

std::vector<TokenId> encode(const Vocab& vocab, const std::string& text,
                            std::size_t max_len) {
  std::vector<RawToken> raw = tokenize_text(text);
  std::vector<TokenId> ids{Vocab::kBos};
  for (const RawToken& tok : raw) {
    if (ids.size() + 1 >= max_len) break;
    ids.push_back(vocab.lookup(tok.text));
  }
  ids.push_back(Vocab::kEos);
  return ids;
}

EncodedText encode_tagged(const Vocab& vocab, const TextualizedPath& entry,
                          std::size_t max_len) {
  EncodedText out;
  out.ids.push_back(Vocab::kBos);
  out.tags.push_back(TokenTag::Filler);
  out.span_index.push_back(0);

  auto contains = [](const CharSpan& span, std::size_t b, std::size_t e) {
    return span.first <= b && e <= span.second;
  };
  for (const RawToken& tok : tokenize_text(entry.text)) {
    if (out.ids.size() + 1 >= max_len) break;
    TokenTag tag = TokenTag::Filler;
    std::uint32_t index = 0;
    for (std::size_t i = 0; i < entry.node_spans.size(); ++i) {
      if (contains(entry.node_spans[i], tok.begin, tok.end)) {
        tag = TokenTag::Node;
        index = static_cast<std::uint32_t>(i);
        break;
      }
    }
    if (tag == TokenTag::Filler) {
      for (std::size_t i = 0; i < entry.edge_spans.size(); ++i) {
        if (contains(entry.edge_spans[i], tok.begin, tok.end)) {
          tag = TokenTag::Edge;
          index = static_cast<std::uint32_t>(i);
          break;
        }
      }
    }
    out.ids.push_back(vocab.lookup(tok.text));
    out.tags.push_back(tag);
    out.span_index.push_back(index);
  }
  out.ids.push_back(Vocab::kEos);
  out.tags.push_back(TokenTag::Filler);
  out.span_index.push_back(0);
  return out;
}

void save_vocab(const Vocab& vocab, const std::string& path) {
  std::string out;
  for (std::size_t i = 0; i < vocab.id_to_token.size(); ++i) {
    out += escape_tsv(vocab.id_to_token[i]);
    out += '\t';
    out += std::to_string(i);
    out += '\n';
  }
  write_text_file(path, out);
}

Vocab load_vocab(const std::string& path) {
  Vocab vocab;
  std::string blob = read_text_file(path);
  std::size_t start = 0;
  while (start < blob.size()) {
    std::size_t nl = blob.find('\n', start);
    if (nl == std::string::npos) nl = blob.size();
    std::string line = blob.substr(start, nl - start);
    start = nl + 1;
    if (line.empty()) continue;
    std::vector<std::string> cols = split_tabs(line);
    if (cols.size() != 2) throw std::runtime_error("malformed vocab line");
    TokenId id = static_cast<TokenId>(std::stol(cols[1]));
    if (id != static_cast<TokenId>(vocab.id_to_token.size())) {
      throw std::runtime_error("vocab ids must be dense and ordered");
    }
    vocab.id_to_token.push_back(unescape_tsv(cols[0]));
  }
  for (std::size_t i = 0; i < vocab.id_to_token.size(); ++i) {
    vocab.token_to_id.emplace(vocab.id_to_token[i], static_cast<TokenId>(i));
  }
  if (vocab.id_to_token.size() < 4) {
    throw std::runtime_error("vocab missing special tokens");
  }
  return vocab;
}

}  // namespace pathllm
