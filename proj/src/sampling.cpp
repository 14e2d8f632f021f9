#include "pathllm/sampling.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "pathllm/errors.hpp"
#include "pathllm/io_util.hpp"
#include "pathllm/rng.hpp"

namespace pathllm {

const char* mode_tag(SampleMode mode) {
  switch (mode) {
    case SampleMode::L2SP: return "l2sp";
    case SampleMode::RandomWalk: return "rw";
    case SampleMode::RandomShortSP: return "rssp";
    case SampleMode::OneHop: return "1hop";
  }
  return "l2sp";
}

SampleMode parse_mode_tag(const std::string& s) {
  if (s == "l2sp") return SampleMode::L2SP;
  if (s == "rw") return SampleMode::RandomWalk;
  if (s == "rssp") return SampleMode::RandomShortSP;
  if (s == "1hop") return SampleMode::OneHop;
  throw ConfigError("unknown sampling mode: " + s);
}

void validate(const SamplerConfig& cfg) {
  if (cfg.b < 1) throw ConfigError("sampler: b must be >= 1");
  if (cfg.L < 2) throw ConfigError("sampler: L must be >= 2");
  if (cfg.k < 1) throw ConfigError("sampler: k must be >= 1");
  if (cfg.ell < 2) throw ConfigError("sampler: ell must be >= 2");
  if (cfg.mode == SampleMode::L2SP && cfg.ell > cfg.L) {
    throw ConfigError("sampler: ell must not exceed L");
  }
}

std::vector<NodeId> candidate_targets(const std::vector<std::int32_t>& dist,
                                      std::uint32_t L) {
  std::vector<NodeId> out;
  for (std::size_t v = 0; v < dist.size(); ++v) {
    if (dist[v] >= static_cast<std::int32_t>(L)) {
      out.push_back(static_cast<NodeId>(v));
    }
  }
  return out;
}

std::vector<LongShortestPath> enumerate_k_shortest_paths(
    const TextAttributedGraph& g, NodeId s, NodeId t, std::uint32_t k,
    std::uint64_t seed) {
  if (s == t) return {LongShortestPath{s, t, {s}}};

  std::vector<std::int32_t> dist = bfs_distances(g, s);
  if (dist[t] < 0) {
    throw std::invalid_argument("target unreachable from source");
  }

  Rng rng(seed);
  std::set<std::vector<NodeId>> seen;
  std::vector<LongShortestPath> paths;
  std::uint64_t attempts = 0;
  const std::uint64_t max_attempts = 10ull * k;
  while (paths.size() < k && attempts < max_attempts) {
    ++attempts;
    std::vector<NodeId> walk{t};
    NodeId cur = t;
    while (cur != s) {
      std::vector<NodeId> preds;
      for (NodeId u : g.neighbors(cur)) {
        if (dist[u] == dist[cur] - 1) preds.push_back(u);
      }
      cur = rng.pick(preds);
      walk.push_back(cur);
    }
    std::reverse(walk.begin(), walk.end());
    if (seen.insert(walk).second) {
      paths.push_back(LongShortestPath{s, t, std::move(walk)});
    }
  }
  return paths;
}

std::vector<ShortestPathSegment> l2sp_cut(const LongShortestPath& p,
                                          std::uint32_t ell) {
  if (ell < 2) throw ConfigError("l2sp_cut: ell must be >= 2");
  const std::vector<NodeId>& nodes = p.nodes;
  if (nodes.size() <= ell) return {ShortestPathSegment{nodes}};

  const std::size_t edges = nodes.size() - 1;
  const std::size_t step = ell - 1;
  std::vector<ShortestPathSegment> segments;
  for (std::size_t start = 0; start < edges; start += step) {
    std::size_t stop = std::min(start + step, edges);
    segments.push_back(ShortestPathSegment{
        std::vector<NodeId>(nodes.begin() + start, nodes.begin() + stop + 1)});
  }
  return segments;
}

namespace {

struct AttemptResult {
  bool ok = false;
  std::vector<LongShortestPath> paths;
};

AttemptResult run_l2sp_attempt(const TextAttributedGraph& g,
                               const SamplerConfig& cfg, NodeId source,
                               std::uint64_t stream_id) {
  AttemptResult res;
  std::vector<std::int32_t> dist = bfs_distances(g, source);
  std::vector<NodeId> targets = candidate_targets(dist, cfg.L);
  if (targets.empty()) return res;

  Rng rng = Rng::substream(cfg.seed, stream_id);
  NodeId target = targets[rng.below(targets.size())];
  res.paths = enumerate_k_shortest_paths(g, source, target, cfg.k,
                                         rng.next_u64());
  res.ok = true;
  return res;
}

void canonicalize(std::vector<LongShortestPath>& paths) {
  std::sort(paths.begin(), paths.end(),
            [](const LongShortestPath& a, const LongShortestPath& b) {
              if (a.source != b.source) return a.source < b.source;
              if (a.target != b.target) return a.target < b.target;
              return a.nodes < b.nodes;
            });
}

}  // namespace

std::vector<LongShortestPath> sample_long_shortest_paths(
    const TextAttributedGraph& g, const SamplerConfig& cfg,
    SampleDiagnostics* diag) {
  validate(cfg);
  if (cfg.mode != SampleMode::L2SP) {
    throw ConfigError("sample_long_shortest_paths requires L2SP mode");
  }
  SampleDiagnostics local;
  SampleDiagnostics& d = diag ? *diag : local;
  d = SampleDiagnostics{};

  std::vector<LongShortestPath> out;
  if (g.node_count() == 0) {
    d.all_empty = true;
    d.message = "graph has no nodes";
    return out;
  }

  Rng source_rng(cfg.seed);
  const std::uint64_t max_attempts = 3 * cfg.b;
  for (std::uint64_t attempt = 0;
       attempt < max_attempts && d.sources_sampled < cfg.b; ++attempt) {
    NodeId source =
        static_cast<NodeId>(source_rng.below(g.node_count()));
    AttemptResult res = run_l2sp_attempt(g, cfg, source, attempt + 1);
    if (!res.ok) {
      ++d.sources_skipped;
      continue;
    }
    ++d.sources_sampled;
    for (LongShortestPath& p : res.paths) {
      d.max_path_length = std::max(
          d.max_path_length, static_cast<std::uint32_t>(p.nodes.size() - 1));
      out.push_back(std::move(p));
    }
  }
  if (out.empty()) {
    d.all_empty = true;
    d.message = "no target at distance >= L from any sampled source"
                " (graph diameter may be smaller than L)";
  }
  canonicalize(out);
  return out;
}

std::vector<ShortestPathSegment> cut_and_dedup(
    const std::vector<LongShortestPath>& paths, std::uint32_t ell) {
  std::set<ShortestPathSegment> unique;
  for (const LongShortestPath& p : paths) {
    for (ShortestPathSegment& seg : l2sp_cut(p, ell)) {
      unique.insert(std::move(seg));
    }
  }
  return {unique.begin(), unique.end()};
}

std::vector<ShortestPathSegment> sample_ablation_paths(
    const TextAttributedGraph& g, const SamplerConfig& cfg,
    SampleDiagnostics* diag) {
  validate(cfg);
  if (cfg.mode == SampleMode::L2SP) {
    throw ConfigError("sample_ablation_paths requires a non-L2SP mode");
  }
  SampleDiagnostics local;
  SampleDiagnostics& d = diag ? *diag : local;
  d = SampleDiagnostics{};

  std::set<ShortestPathSegment> unique;
  if (g.node_count() == 0) {
    d.all_empty = true;
    d.message = "graph has no nodes";
    return {};
  }

  Rng source_rng(cfg.seed);
  for (std::uint64_t i = 0; i < cfg.b; ++i) {
    NodeId v = static_cast<NodeId>(source_rng.below(g.node_count()));
    Rng rng = Rng::substream(cfg.seed, i + 1);
    switch (cfg.mode) {
      case SampleMode::RandomWalk: {
        if (g.neighbors(v).empty()) {
          ++d.sources_skipped;
          continue;
        }
        std::vector<NodeId> walk{v};
        while (walk.size() < cfg.ell) {
          const std::vector<NodeId>& nbrs = g.neighbors(walk.back());
          if (nbrs.empty()) break;
          walk.push_back(nbrs[rng.below(nbrs.size())]);
        }
        if (walk.size() < 2) {
          ++d.sources_skipped;
          continue;
        }
        ++d.sources_sampled;
        d.max_path_length = std::max(
            d.max_path_length, static_cast<std::uint32_t>(walk.size() - 1));
        unique.insert(ShortestPathSegment{std::move(walk)});
        break;
      }
      case SampleMode::RandomShortSP: {
        NodeId t = static_cast<NodeId>(rng.below(g.node_count()));
        if (t == v) {
          ++d.sources_skipped;
          continue;
        }
        std::vector<std::int32_t> dist = bfs_distances(g, v);
        if (dist[t] < 0 ||
            dist[t] + 1 > static_cast<std::int32_t>(cfg.ell)) {
          ++d.sources_skipped;
          continue;
        }
        std::vector<LongShortestPath> ps =
            enumerate_k_shortest_paths(g, v, t, 1, rng.next_u64());
        ++d.sources_sampled;
        d.max_path_length =
            std::max(d.max_path_length, static_cast<std::uint32_t>(dist[t]));
        unique.insert(ShortestPathSegment{std::move(ps.front().nodes)});
        break;
      }
      case SampleMode::OneHop: {
        if (g.neighbors(v).empty()) {
          ++d.sources_skipped;
          continue;
        }
        ++d.sources_sampled;
        d.max_path_length = std::max(d.max_path_length, 1u);
        for (NodeId u : g.neighbors(v)) {
          unique.insert(ShortestPathSegment{{v, u}});
        }
        break;
      }
      case SampleMode::L2SP:
        break;
    }
  }
  if (unique.empty()) {
    d.all_empty = true;
    d.message = "no path sampled";
  }
  return {unique.begin(), unique.end()};
}

std::vector<ShortestPathSegment> sample_segments(
    const TextAttributedGraph& g, const SamplerConfig& cfg,
    SampleDiagnostics* diag) {
  if (cfg.mode == SampleMode::L2SP) {
    std::vector<LongShortestPath> paths =
        sample_long_shortest_paths(g, cfg, diag);
    return cut_and_dedup(paths, cfg.ell);
  }
  return sample_ablation_paths(g, cfg, diag);
}

void write_paths_jsonl(const std::string& path,
                       const std::vector<ShortestPathSegment>& segments,
                       SampleMode mode) {
  std::string out;
  for (const ShortestPathSegment& seg : segments) {
    nlohmann::json obj;
    obj["mode"] = mode_tag(mode);
    obj["nodes"] = seg.nodes;
    out += obj.dump();
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<ShortestPathSegment> read_paths_jsonl(const std::string& path,
                                                  SampleMode* mode) {
  std::string blob = read_text_file(path);
  std::vector<ShortestPathSegment> segments;
  std::size_t start = 0;
  while (start < blob.size()) {
    std::size_t nl = blob.find('\n', start);
    if (nl == std::string::npos) nl = blob.size();
    std::string line = blob.substr(start, nl - start);
    start = nl + 1;
    if (line.empty()) continue;
    nlohmann::json obj = nlohmann::json::parse(line);
    if (mode) *mode = parse_mode_tag(obj.at("mode").get<std::string>());
    segments.push_back(
        ShortestPathSegment{obj.at("nodes").get<std::vector<NodeId>>()});
  }
  return segments;
}

}  // namespace pathllm
