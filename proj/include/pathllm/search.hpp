#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pathllm/graph.hpp"
#include "pathllm/query_graph.hpp"

namespace pathllm {

enum class KeywordMatch { TokenExact, SubstringCI };

struct QuerySpec {
  std::vector<std::string> keywords;  // deduplicated, each non-empty
  KeywordMatch match = KeywordMatch::TokenExact;
};

// Throws ConfigError on empty keywords or fewer than 2 after dedup.
void validate(const QuerySpec& q);

// Best-matching node per keyword. TokenExact requires every keyword token
// among the node's cleaned attribute tokens; SubstringCI matches the phrase
// case-insensitively. Score is the matched fraction of the node's tokens
// (resp. characters); ties go to the lowest node id. An unmatched keyword
// raises InfeasibleQueryError.
std::vector<std::pair<std::string, NodeId>> map_keywords_to_terminals(
    const TextAttributedGraph& g, const QuerySpec& q);

struct PathResult {
  std::vector<NodeId> nodes;  // s..t; a single node when s == t
  double cost = 0.0;
};

// Minimum-weight path in G*; among equal-cost paths returns the
// lexicographically smallest node sequence. Throws InfeasibleQueryError
// when t is unreachable.
PathResult dijkstra_min_weight_path(const WeightedQueryGraph& wg, NodeId s,
                                    NodeId t);

struct SteinerAnswer {
  std::vector<std::pair<std::string, NodeId>> terminals;  // keyword -> node
  std::vector<NodeId> terminal_nodes;  // distinct, ascending
  std::vector<WeightedEdge> edges;     // tree edges, canonical order
  double cost = 0.0;
};

// Mehlhorn's 2-approximation: Voronoi regions by multi-source Dijkstra,
// MST over the terminal distance graph, expansion to base paths, MST of
// the union, then iterative pruning of non-terminal leaves. Guarantees
// cost <= 2(1 - 1/m) * optimum. Throws InfeasibleQueryError when the
// terminals span components.
SteinerAnswer steiner_2approx(const WeightedQueryGraph& wg,
                              const std::vector<NodeId>& terminals);

// Exact optimum by enumerating node subsets (rejects node_count > 16):
// min over supersets S of the terminals of the MST cost of G*[S].
double steiner_exact_oracle(const WeightedQueryGraph& wg,
                            const std::vector<NodeId>& terminals);

struct AnswerDistance {
  double mean = 0.0;  // mean tree hop distance over unordered terminal pairs
  double sum = 0.0;
  std::size_t pairs = 0;
};

AnswerDistance answer_distance(const SteinerAnswer& answer);

// Deterministic DOT rendering; terminals filled, edges labeled f*/w*.
std::string export_answer_dot(const SteinerAnswer& answer,
                              const TextAttributedGraph& g);

// JSON report: keyword -> node mapping, tree edges, cost and the mean/sum
// pairwise terminal distance within the answer tree.
std::string export_answer_json(const SteinerAnswer& answer,
                               const TextAttributedGraph& g);

}  // namespace pathllm
