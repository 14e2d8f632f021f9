#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pathllm/graph.hpp"

namespace pathllm {

enum class SampleMode { L2SP, RandomWalk, RandomShortSP, OneHop };

const char* mode_tag(SampleMode mode);            // "l2sp", "rw", "rssp", "1hop"
SampleMode parse_mode_tag(const std::string& s);  // inverse; throws ConfigError

struct SamplerConfig {
  std::uint64_t b = 1000;  // number of source nodes to sample
  std::uint32_t L = 10;    // minimum long-path length in hops
  std::uint32_t k = 5;     // shortest paths per (source, target) pair
  std::uint32_t ell = 3;   // maximum segment length in nodes
  std::uint64_t seed = 0;
  SampleMode mode = SampleMode::L2SP;
};

// Throws ConfigError unless b >= 1, L >= 2, k >= 1, ell >= 2 and,
// for L2SP mode, ell <= L.
void validate(const SamplerConfig& cfg);

struct LongShortestPath {
  NodeId source = 0;
  NodeId target = 0;
  std::vector<NodeId> nodes;  // source..target, consecutive nodes adjacent
};

struct ShortestPathSegment {
  std::vector<NodeId> nodes;

  bool operator==(const ShortestPathSegment& o) const { return nodes == o.nodes; }
  bool operator<(const ShortestPathSegment& o) const { return nodes < o.nodes; }
};

struct SampleDiagnostics {
  std::size_t sources_sampled = 0;  // sources that produced at least one path
  std::size_t sources_skipped = 0;  // empty candidate set / isolated / rejected
  std::uint32_t max_path_length = 0;  // longest sampled path, in hops
  bool all_empty = false;
  std::string message;
};

// All nodes at hop distance >= L given a BFS distance vector; ascending ids.
std::vector<NodeId> candidate_targets(const std::vector<std::int32_t>& dist,
                                      std::uint32_t L);

// Samples up to k distinct shortest s-t paths by seeded random predecessor
// walks over the shortest-path DAG (at most 10*k attempts). Every returned
// path has exactly dist(s,t) hops. Throws std::invalid_argument when t is
// unreachable from s. s == t yields the single zero-length path <s>.
std::vector<LongShortestPath> enumerate_k_shortest_paths(
    const TextAttributedGraph& g, NodeId s, NodeId t, std::uint32_t k,
    std::uint64_t seed);

// Cuts a path into consecutive segments of ell-1 edges starting at indices
// alpha*(ell-1), plus a shorter final remainder; adjacent segments share
// their cut node. A path of <= ell nodes is returned unchanged.
std::vector<ShortestPathSegment> l2sp_cut(const LongShortestPath& p,
                                          std::uint32_t ell);

// Long-to-short sampling: b random sources, per source one uniformly chosen
// target at distance >= L and up to k distinct shortest paths to it. Sources
// with no candidate target are resampled (up to 3*b attempts total), then
// skipped and counted. Output is canonically ordered.
std::vector<LongShortestPath> sample_long_shortest_paths(
    const TextAttributedGraph& g, const SamplerConfig& cfg,
    SampleDiagnostics* diag = nullptr);

// Baseline samplers sharing SamplerConfig:
//   RandomWalk    uniform-neighbor walks of ell nodes from b random sources
//   RandomShortSP shortest paths between random pairs, kept when <= ell nodes
//   OneHop        <v, u> for each sampled v and each neighbor u
std::vector<ShortestPathSegment> sample_ablation_paths(
    const TextAttributedGraph& g, const SamplerConfig& cfg,
    SampleDiagnostics* diag = nullptr);

// Cuts every path, removes duplicate segments, sorts lexicographically.
std::vector<ShortestPathSegment> cut_and_dedup(
    const std::vector<LongShortestPath>& paths, std::uint32_t ell);

// Dispatches on cfg.mode and returns the final deduplicated segment list.
std::vector<ShortestPathSegment> sample_segments(
    const TextAttributedGraph& g, const SamplerConfig& cfg,
    SampleDiagnostics* diag = nullptr);

// One JSON object per line: {"mode":"...","nodes":[...]}.
void write_paths_jsonl(const std::string& path,
                       const std::vector<ShortestPathSegment>& segments,
                       SampleMode mode);
std::vector<ShortestPathSegment> read_paths_jsonl(const std::string& path,
                                                  SampleMode* mode = nullptr);

}  // namespace pathllm
