#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pathllm/graph.hpp"
#include "pathllm/keyphrase.hpp"
#include "pathllm/sampling.hpp"

namespace pathllm {

using CharSpan = std::pair<std::size_t, std::size_t>;  // [start, end)

struct TextualizedPath {
  std::string text;
  std::vector<NodeId> nodes;
  std::vector<CharSpan> node_spans;  // one per node, covers its rendering
  std::vector<CharSpan> edge_spans;  // one per hop, covers the relation text
};

// Node rendering used inside a path text. Homogeneous graphs use
// "paper with content: {p1}, {p2}"; heterogeneous graphs use
// "{node_type} {p1}, {p2}". Empty phrase lists drop the trailing space.
std::string render_node(GraphKind kind, const std::string& node_type,
                        const std::vector<std::string>& phrases);

// Relation rendering for one hop; empty cleaned edge text falls back to
// "cites" (homogeneous) or "linked to" (heterogeneous).
std::string render_edge(GraphKind kind, const std::string& edge_text);

// Renders node / relation / node ... with single-space joiners and a final
// period, recording exact character spans.
TextualizedPath textualize_path(const ShortestPathSegment& seg,
                                const TextAttributedGraph& g,
                                const std::vector<KeyphraseSet>& phrases);

struct TextualizerConfig {
  std::size_t max_phrases = 5;
  StopwordList stopwords = default_stopwords();
  std::size_t threads = 1;
};

struct Corpus {
  std::vector<TextualizedPath> entries;
  std::vector<KeyphraseSet> node_phrases;   // indexed by dense node id
  std::size_t empty_attribute_nodes = 0;    // nodes with no extracted phrase
};

// Cleans and keyphrase-extracts each node text once, then renders every
// segment in order.
Corpus build_corpus(const std::vector<ShortestPathSegment>& segments,
                    const TextAttributedGraph& g,
                    const TextualizerConfig& cfg);

// One JSON object per line:
// {"text":..., "nodes":[...], "node_spans":[[s,e]...], "edge_spans":[[s,e]...]}
void write_corpus_jsonl(const std::string& path,
                        const std::vector<TextualizedPath>& entries);
std::vector<TextualizedPath> read_corpus_jsonl(const std::string& path);

}  // namespace pathllm
