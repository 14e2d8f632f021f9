#include "pathllm/textualize.hpp"

#include "json.hpp"
#include "pathllm/io_util.hpp"
#include "pathllm/parallel.hpp"
#include "pathllm/text_clean.hpp"

namespace pathllm {

std::string render_node(GraphKind kind, const std::string& node_type,
                        const std::vector<std::string>& phrases) {
  std::string out = kind == GraphKind::Homogeneous
                        ? "paper with content:"
                        : lowercase_ascii(node_type);
  for (std::size_t i = 0; i < phrases.size(); ++i) {
    out += i == 0 ? " " : ", ";
    out += phrases[i];
  }
  return out;
}

std::string render_edge(GraphKind kind, const std::string& edge_text) {
  std::string cleaned = lowercase_ascii(clean_text(edge_text));
  if (!cleaned.empty()) return cleaned;
  return kind == GraphKind::Homogeneous ? "cites" : "linked to";
}

TextualizedPath textualize_path(const ShortestPathSegment& seg,
                                const TextAttributedGraph& g,
                                const std::vector<KeyphraseSet>& phrases) {
  TextualizedPath out;
  out.nodes = seg.nodes;
  for (std::size_t i = 0; i < seg.nodes.size(); ++i) {
    NodeId v = seg.nodes[i];
    if (i > 0) {
      const EdgeRecord* e = g.find_edge(seg.nodes[i - 1], v);
      std::string rel = render_edge(g.kind, e ? e->edge_text : "");
      out.text += ' ';
      out.edge_spans.emplace_back(out.text.size(), out.text.size() + rel.size());
      out.text += rel;
      out.text += ' ';
    }
    std::vector<std::string> node_phrases;
    for (const auto& [phrase, score] : phrases[v].phrases) {
      node_phrases.push_back(phrase);
    }
    std::string rendered =
        render_node(g.kind, g.nodes[v].node_type, node_phrases);
    out.node_spans.emplace_back(out.text.size(),
                                out.text.size() + rendered.size());
    out.text += rendered;
  }
  out.text += '.';
  return out;
}

Corpus build_corpus(const std::vector<ShortestPathSegment>& segments,
                    const TextAttributedGraph& g,
                    const TextualizerConfig& cfg) {
  Corpus corpus;
  corpus.node_phrases.resize(g.node_count());
  parallel_for(g.node_count(), cfg.threads, [&](std::size_t v) {
    KeyphraseSet set = extract_keyphrases(clean_text(g.nodes[v].raw_text),
                                          cfg.max_phrases, cfg.stopwords);
    set.node = static_cast<NodeId>(v);
    corpus.node_phrases[v] = std::move(set);
  });
  for (const KeyphraseSet& set : corpus.node_phrases) {
    if (set.phrases.empty()) ++corpus.empty_attribute_nodes;
  }
  corpus.entries.reserve(segments.size());
  for (const ShortestPathSegment& seg : segments) {
    corpus.entries.push_back(textualize_path(seg, g, corpus.node_phrases));
  }
  return corpus;
}

void write_corpus_jsonl(const std::string& path,
                        const std::vector<TextualizedPath>& entries) {
  std::string out;
  for (const TextualizedPath& entry : entries) {
    nlohmann::json obj;
    obj["text"] = entry.text;
    obj["nodes"] = entry.nodes;
    auto spans = [](const std::vector<CharSpan>& in) {
      nlohmann::json arr = nlohmann::json::array();
      for (const CharSpan& s : in) arr.push_back({s.first, s.second});
      return arr;
    };
    obj["node_spans"] = spans(entry.node_spans);
    obj["edge_spans"] = spans(entry.edge_spans);
    out += obj.dump();
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<TextualizedPath> read_corpus_jsonl(const std::string& path) {
  std::vector<TextualizedPath> entries;
  std::string blob = read_text_file(path);
  std::size_t start = 0;
  while (start < blob.size()) {
    std::size_t nl = blob.find('\n', start);
    if (nl == std::string::npos) nl = blob.size();
    std::string line = blob.substr(start, nl - start);
    start = nl + 1;
    if (line.empty()) continue;
    nlohmann::json obj = nlohmann::json::parse(line);
    TextualizedPath entry;
    entry.text = obj.at("text").get<std::string>();
    entry.nodes = obj.at("nodes").get<std::vector<NodeId>>();
    for (const auto& s : obj.at("node_spans")) {
      entry.node_spans.emplace_back(s.at(0).get<std::size_t>(),
                                    s.at(1).get<std::size_t>());
    }
    for (const auto& s : obj.at("edge_spans")) {
      entry.edge_spans.emplace_back(s.at(0).get<std::size_t>(),
                                    s.at(1).get<std::size_t>());
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

}  // namespace pathllm
