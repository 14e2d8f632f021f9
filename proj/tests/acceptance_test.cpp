// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances and runtime budgets are pinned as constants below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "pathllm/embedding.hpp"
#include "pathllm/errors.hpp"
#include "pathllm/eval.hpp"
#include "pathllm/graph.hpp"
#include "pathllm/io_util.hpp"
#include "pathllm/keyphrase.hpp"
#include "pathllm/model.hpp"
#include "pathllm/pipeline.hpp"
#include "pathllm/query_graph.hpp"
#include "pathllm/rng.hpp"
#include "pathllm/sampling.hpp"
#include "pathllm/search.hpp"
#include "pathllm/text_clean.hpp"
#include "pathllm/textualize.hpp"
#include "pathllm/train.hpp"
#include "pathllm/vocab.hpp"

using namespace pathllm;
namespace fs = std::filesystem;

namespace {

constexpr double kExactTol = 1e-12;
constexpr double kSpanTol = 1e-9;
constexpr double kRelTol = 1e-9;
constexpr double kGradTol = 1e-4;
constexpr double kOverfitLoss = 0.1;
constexpr double kCostTieTol = 1e-9;
constexpr double kSimplexTol = 1e-9;
constexpr double kResidualTol = 1e-8;
constexpr double kSeparableFloor = 0.95;
constexpr double kChanceAccBand = 0.15;
constexpr double kChanceAucBand = 0.1;

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

// ---- shared fixture builders ------------------------------------------------

TextAttributedGraph chain_graph(std::size_t n_nodes) {
  std::vector<NodeRecord> nodes;
  std::vector<EdgeRecord> edges;
  for (std::size_t i = 0; i < n_nodes; ++i) {
    nodes.push_back({static_cast<NodeId>(i), "v" + std::to_string(i), "", ""});
    if (i > 0) {
      edges.push_back({static_cast<NodeId>(i - 1), static_cast<NodeId>(i), ""});
    }
  }
  return make_graph(GraphKind::Homogeneous, std::move(nodes), std::move(edges));
}

// Connected: random tree plus extra chords.
TextAttributedGraph random_connected_graph(std::uint64_t seed, std::size_t n,
                                           std::size_t extra) {
  Rng rng(seed);
  std::vector<NodeRecord> nodes;
  for (std::size_t i = 0; i < n; ++i) {
    nodes.push_back({static_cast<NodeId>(i), "n" + std::to_string(i), "", ""});
  }
  std::vector<EdgeRecord> edges;
  for (std::size_t i = 1; i < n; ++i) {
    edges.push_back({static_cast<NodeId>(rng.below(i)),
                     static_cast<NodeId>(i), ""});
  }
  for (std::size_t i = 0; i < extra; ++i) {
    NodeId a = static_cast<NodeId>(rng.below(n));
    NodeId b = static_cast<NodeId>(rng.below(n));
    if (a != b) edges.push_back({a, b, ""});
  }
  return make_graph(GraphKind::Homogeneous, std::move(nodes), std::move(edges));
}

WeightedQueryGraph random_weighted_graph(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::set<std::pair<NodeId, NodeId>> seen;
  std::vector<WeightedEdge> edges;
  auto add = [&](NodeId a, NodeId b) {
    if (a == b) return;
    if (a > b) std::swap(a, b);
    if (!seen.insert({a, b}).second) return;
    WeightedEdge e;
    e.src = a;
    e.dst = b;
    e.w_star = 0.1 + 1.9 * rng.uniform();
    e.f_star = std::exp(-e.w_star);
    edges.push_back(e);
  };
  for (std::size_t i = 1; i < n; ++i) {
    add(static_cast<NodeId>(rng.below(i)), static_cast<NodeId>(i));
  }
  for (std::size_t i = 0; i < 2 * n; ++i) {
    add(static_cast<NodeId>(rng.below(n)), static_cast<NodeId>(rng.below(n)));
  }
  return make_query_graph(n, std::move(edges));
}

// Every sampled segment must itself be a shortest path in g.
bool segment_is_shortest(const TextAttributedGraph& g,
                         const std::vector<NodeId>& nodes) {
  if (nodes.empty()) return false;
  std::vector<std::int32_t> dist = bfs_distances(g, nodes.front());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (dist[nodes[i]] != static_cast<std::int32_t>(i)) return false;
    if (i > 0 && g.find_edge(nodes[i - 1], nodes[i]) == nullptr) return false;
  }
  return true;
}

std::vector<TextualizedPath> fixture_entries() {
  struct Spec {
    const char* a;
    const char* b;
    const char* rel;
  };
  std::vector<Spec> specs = {
      {"graph embedding with sampled paths", "keyword search over trees", ""},
      {"gene slc2a1 expression", "disease epilepsy onset", "associated with"},
      {"protein kinase binding", "receptor activation cascade", "regulates"},
      {"database index structures", "query planning engines", "optimizes"},
      {"network routing tables", "congestion control loops", ""},
      {"token prediction objective", "prefix attention masks", "depends on"},
      {"steiner tree expansion", "voronoi region bridges", "derived from"},
      {"cosine similarity weights", "negative edge filtering", "produces"},
      {"stratified validation folds", "macro averaged scores", "feeds"},
      {"manifest content hashes", "phase skipping logic", "drives"}};
  std::vector<TextualizedPath> entries;
  for (const Spec& s : specs) {
    std::vector<NodeRecord> nodes = {{0, "a", "paper", s.a},
                                     {1, "b", "paper", s.b}};
    std::vector<EdgeRecord> edges = {{0, 1, s.rel}};
    TextAttributedGraph g =
        make_graph(GraphKind::Homogeneous, std::move(nodes), std::move(edges));
    TextualizerConfig cfg;
    Corpus corpus = build_corpus({{std::vector<NodeId>{0, 1}}}, g, cfg);
    entries.push_back(corpus.entries[0]);
  }
  return entries;
}

double independent_log_product(const ToyModel<double>& m,
                               const std::vector<TokenId>& ids) {
  std::vector<double> logits = m.forward_logits(ids);
  const std::size_t V = m.cfg.vocab;
  double total = 0.0;
  for (std::size_t j = 1; j < ids.size(); ++j) {
    const double* row = &logits[(j - 1) * V];
    double mx = row[0];
    for (std::size_t v = 1; v < V; ++v) mx = std::max(mx, row[v]);
    double z = 0.0;
    for (std::size_t v = 0; v < V; ++v) z += std::exp(row[v] - mx);
    total += row[ids[j]] - mx - std::log(z);
  }
  return total;
}

// ---- criteria ----------------------------------------------------------------

Check criterion_segment_cut() {
  Check c;

  // Worked example: a ten-node path with ell=3 cuts into exactly five
  // segments with shared endpoints.
  {
    LongShortestPath p;
    p.source = 0;
    p.target = 9;
    for (NodeId v = 0; v < 10; ++v) p.nodes.push_back(v);
    std::vector<ShortestPathSegment> segs = l2sp_cut(p, 3);
    c.require(segs.size() == 5, "ten-node example: expected 5 segments, got " +
                                    std::to_string(segs.size()));
    std::vector<std::vector<NodeId>> expected = {
        {0, 1, 2}, {2, 3, 4}, {4, 5, 6}, {6, 7, 8}, {8, 9}};
    for (std::size_t i = 0; i < segs.size() && i < expected.size(); ++i) {
      c.require(segs[i].nodes == expected[i],
                "ten-node example: segment " + std::to_string(i) + " mismatch");
    }
  }

  // Exhaustive sweep: every segment passes the BFS shortest-path oracle and
  // consecutive segments share their cut node.
  for (std::uint32_t L = 2; L <= 40; ++L) {
    TextAttributedGraph g = chain_graph(L + 1);
    LongShortestPath p;
    p.source = 0;
    p.target = static_cast<NodeId>(L);
    for (NodeId v = 0; v <= static_cast<NodeId>(L); ++v) p.nodes.push_back(v);
    for (std::uint32_t ell = 2; ell <= 6; ++ell) {
      std::vector<ShortestPathSegment> segs = l2sp_cut(p, ell);
      std::size_t expected_count = (L + ell - 2) / (ell - 1);
      c.require(segs.size() == expected_count,
                "L=" + std::to_string(L) + " ell=" + std::to_string(ell) +
                    ": segment count");
      std::vector<NodeId> glued;
      for (std::size_t i = 0; i < segs.size(); ++i) {
        c.require(segs[i].nodes.size() >= 2 && segs[i].nodes.size() <= ell,
                  "segment size out of range");
        c.require(segment_is_shortest(g, segs[i].nodes),
                  "segment fails the BFS oracle");
        if (i > 0) {
          c.require(segs[i - 1].nodes.back() == segs[i].nodes.front(),
                    "segments do not chain via a shared cut node");
          glued.insert(glued.end(), segs[i].nodes.begin() + 1,
                       segs[i].nodes.end());
        } else {
          glued = segs[i].nodes;
        }
      }
      c.require(glued == p.nodes, "glued segments do not rebuild the path");
    }
  }

  // The oracle also holds for segments cut from real sampled paths.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    TextAttributedGraph g = random_connected_graph(seed, 60, 40);
    SamplerConfig cfg;
    cfg.b = 5;
    cfg.L = 3;
    cfg.k = 2;
    cfg.ell = 3;
    cfg.seed = seed;
    std::vector<ShortestPathSegment> segs = sample_segments(g, cfg);
    c.require(!segs.empty(), "no segments sampled from a random graph");
    for (const ShortestPathSegment& s : segs) {
      c.require(segment_is_shortest(g, s.nodes),
                "sampled segment fails the BFS oracle");
    }
  }
  return c;
}

Check criterion_sampling_soundness() {
  Check c;
  std::size_t total_paths = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::size_t n = 20 + (seed * 37) % 181;  // up to 200 nodes
    TextAttributedGraph g = random_connected_graph(seed, n, n / 2);
    SamplerConfig cfg;
    cfg.b = 8;
    cfg.L = 3 + static_cast<std::uint32_t>(seed % 3);
    cfg.k = 2;
    cfg.ell = 3;
    cfg.seed = seed;
    SampleDiagnostics diag;
    std::vector<LongShortestPath> paths =
        sample_long_shortest_paths(g, cfg, &diag);
    for (const LongShortestPath& p : paths) {
      ++total_paths;
      std::vector<std::int32_t> dist = bfs_distances(g, p.source);
      std::int32_t hops = static_cast<std::int32_t>(p.nodes.size()) - 1;
      c.require(p.nodes.front() == p.source && p.nodes.back() == p.target,
                "path endpoints disagree with its metadata");
      c.require(dist[p.target] == hops,
                "path length differs from the BFS distance");
      c.require(hops >= static_cast<std::int32_t>(cfg.L),
                "sampled path shorter than L");
      for (std::size_t i = 1; i < p.nodes.size(); ++i) {
        c.require(g.find_edge(p.nodes[i - 1], p.nodes[i]) != nullptr,
                  "non-adjacent consecutive path nodes");
      }
    }
  }
  c.require(total_paths > 100, "too few paths sampled to be meaningful");
  return c;
}

Check criterion_factorization() {
  Check c;
  std::vector<TextualizedPath> entries = fixture_entries();
  std::size_t fixtures = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (const TextualizedPath& entry : entries) {
      Vocab v = build_vocab({entry});
      ModelConfig mc;
      mc.d = 16;
      mc.h = 2;
      mc.blocks = 1 + seed % 2;
      mc.vocab = static_cast<std::uint32_t>(v.size());
      mc.max_len = 64;
      ToyModel<double> m(mc);
      m.init_parameters(seed * 101);
      EncodedText enc = encode_tagged(v, entry, mc.max_len);
      SequenceLogprob lp = sequence_logprob(m, enc);

      double span_sum = 0.0;
      for (const SpanLogprob& s : lp.per_span) span_sum += s.logprob;
      c.require(std::fabs(span_sum - lp.total) < kSpanTol,
                "span log-probs do not sum to the sequence total");
      c.require(std::fabs(lp.grouping_residual) < kSpanTol,
                "grouping residual above tolerance");

      double log_product = independent_log_product(m, enc.ids);
      double rel = std::fabs(std::exp(lp.total) - std::exp(log_product)) /
                   std::exp(log_product);
      c.require(rel < kRelTol, "exp(total) differs from the step product");
      ++fixtures;
    }
  }
  c.require(fixtures == 50, "expected 50 fixtures");
  return c;
}

Check criterion_clm_loss() {
  Check c;

  // Uniform logits: an all-zero model scores every target at ln |D|.
  for (std::uint32_t vocab : {7u, 11u, 53u}) {
    ModelConfig mc;
    mc.d = 16;
    mc.h = 2;
    mc.blocks = 2;
    mc.vocab = vocab;
    mc.max_len = 32;
    ToyModel<double> m(mc);
    std::vector<TokenId> toks = {2, 4, 5, 6, 4, 5, 3};
    c.require(std::fabs(m.clm_loss(toks) - std::log(double(vocab))) < kExactTol,
              "uniform-logit loss differs from ln|D|");
  }

  // Analytic gradient vs central differences over sampled coordinates.
  {
    ModelConfig mc;
    mc.d = 16;
    mc.h = 2;
    mc.blocks = 2;
    mc.vocab = 19;
    mc.max_len = 32;
    ToyModel<double> m(mc);
    m.init_parameters(7);
    std::vector<TokenId> toks = {2, 4, 9, 5, 12, 7, 15, 6, 11, 18, 8, 3};
    double worst = finite_difference_gradcheck(m, toks, 1e-5, 250, 13);
    c.require(worst < kGradTol,
              "gradient check worst relative error " + std::to_string(worst));
  }

  // Ten short fixed texts memorized to below the loss threshold. Texts have
  // distinct openings so the irreducible branching entropy ln(10), spread
  // over ~30 targets each, sits below the threshold.
  {
    std::vector<std::string> texts = {
        "gene slc2a1 associated with disease epilepsy linked to gene scn1a "
        "associated with disease febrile seizures observed in cortical tissue "
        "samples collected across three regional clinics during the screening "
        "study.",
        "protein kinase alpha interacts with protein receptor beta regulates "
        "protein channel gamma within the signaling cascade assay measured "
        "twice weekly under varied temperature and acidity conditions in "
        "culture.",
        "drug aspirin treats disease inflammation reduces symptom fever "
        "observed across drug trial cohorts with placebo controls spanning "
        "four dosage arms and two follow up intervals after initial intake.",
        "author smith writes paper on embedding methods cites author jones "
        "writing on retrieval systems for citation networks indexed by year "
        "venue and topic across two decades of proceedings.",
        "dataset citations contains paper records linked to dataset abstracts "
        "containing raw text fields for every indexed node refreshed nightly "
        "from upstream archives and validated against checksum manifests.",
        "method sampling selects long routes cuts them into short overlapping "
        "segments shares endpoints between consecutive segments preserving "
        "shortest distance inside every window while covering the whole route "
        "exactly once.",
        "model transformer predicts next token from prefix only attends to "
        "earlier positions learns corpus structure by gradient descent with "
        "adaptive moments and a fixed schedule of constant step size.",
        "query keywords map to matching nodes connected by cheap routes "
        "through the reweighted similarity structure of the base network "
        "returning a compact tree that touches every requested terminal.",
        "graph nodes carry text attributes edges carry relation labels both "
        "rendered through templates into natural language sentences joined by "
        "relation words and terminated with a single closing period.",
        "node embeddings average hidden states over content tokens excluding "
        "boundary markers yielding fixed width vectors for downstream "
        "classification and validation tasks evaluated by stratified folds "
        "and ranking curves."};
    std::vector<TextualizedPath> corpus;
    for (const std::string& t : texts) {
      TextualizedPath e;
      e.text = t;
      corpus.push_back(e);
    }
    Vocab v = build_vocab(corpus);
    std::vector<std::vector<TokenId>> seqs;
    for (const TextualizedPath& e : corpus) {
      seqs.push_back(encode(v, e.text, 64));
    }
    ModelConfig mc;
    mc.d = 32;
    mc.h = 4;
    mc.blocks = 1;
    mc.vocab = static_cast<std::uint32_t>(v.size());
    mc.max_len = 64;
    ToyModel<float> m(mc);
    m.init_parameters(123);
    TrainConfig tc;
    tc.lr = 3e-3;
    tc.batch = 10;
    tc.steps = 800;  // within the 2000-step budget
    tc.seed = 9;
    train(m, seqs, tc);
    double full = 0.0;
    for (const std::vector<TokenId>& s : seqs) full += m.clm_loss(s);
    full /= static_cast<double>(seqs.size());
    c.require(full < kOverfitLoss,
              "overfit loss " + std::to_string(full) + " not below 0.1");
  }
  return c;
}

Check criterion_pooling() {
  Check c;
  std::vector<std::string> texts = {"graph embedding search",
                                    "token prediction objective with markers",
                                    "steiner tree expansion bridges"};
  std::vector<TextualizedPath> corpus;
  for (const std::string& t : texts) {
    TextualizedPath e;
    e.text = t;
    corpus.push_back(e);
  }
  Vocab v = build_vocab(corpus);
  ModelConfig mc;
  mc.d = 24;
  mc.h = 3;
  mc.blocks = 2;
  mc.vocab = static_cast<std::uint32_t>(v.size());
  mc.max_len = 32;
  ToyModel<double> m(mc);
  m.init_parameters(77);

  for (const std::string& text : texts) {
    auto [xi, empty] = extract_node_embedding(m, text, v);
    c.require(!empty, "non-empty text flagged empty");
    std::vector<TokenId> ids = encode(v, text, mc.max_len);
    std::vector<double> states = m.last_hidden_states(ids);
    for (std::size_t i = 0; i < mc.d; ++i) {
      double mean = 0.0;
      for (std::size_t t = 1; t + 1 < ids.size(); ++t) {
        mean += states[t * mc.d + i];
      }
      mean /= static_cast<double>(ids.size() - 2);
      c.require(std::fabs(xi[i] - mean) < kExactTol,
                "pooled embedding differs from the external mean");
    }
  }

  // r=1: a single content token pools to exactly that hidden state.
  {
    auto [xi, empty] = extract_node_embedding(m, "graph", v);
    c.require(!empty, "single-token text flagged empty");
    std::vector<TokenId> ids = encode(v, "graph", mc.max_len);
    std::vector<double> states = m.last_hidden_states(ids);
    for (std::size_t i = 0; i < mc.d; ++i) {
      c.require(xi[i] == states[mc.d + i], "r=1 pooling not bitwise exact");
    }
  }
  return c;
}

Check criterion_weighting() {
  Check c;

  // Exact similarity endpoints.
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    std::vector<float> x(1 + rng.below(48));
    for (float& e : x) e = static_cast<float>(rng.normal());
    std::vector<float> nx = x;
    for (float& e : nx) e = -e;
    c.require(cosine_similarity(x, x) == 1.0, "psi(x,x) is not exactly 1");
    c.require(cosine_similarity(x, nx) == -1.0, "psi(x,-x) is not exactly -1");
  }

  // Non-positive similarities leave the edge set; the rest carry
  // w* = -ln f*.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    TextAttributedGraph g = random_connected_graph(seed, 8, 6);
    Rng rng(seed + 1000);
    EmbeddingTable table;
    table.dim = 4;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      std::vector<float> v(4);
      for (float& e : v) e = static_cast<float>(rng.normal());
      table.vectors.push_back(v);
    }
    WeightedQueryGraph wg = build_query_graph(g, table);
    std::set<std::pair<NodeId, NodeId>> kept;
    for (const WeightedEdge& e : wg.edges) {
      kept.insert({e.src, e.dst});
      double psi = cosine_similarity(table.vectors[e.src],
                                     table.vectors[e.dst]);
      c.require(psi > 0.0, "kept edge has non-positive similarity");
      c.require(e.f_star == psi, "edge importance differs from psi");
      c.require(std::fabs(e.w_star + std::log(e.f_star)) < kExactTol,
                "w* differs from -ln f*");
    }
    for (const EdgeRecord& e : g.edges) {
      if (kept.count({e.src, e.dst})) continue;
      double psi =
          cosine_similarity(table.vectors[e.src], table.vectors[e.dst]);
      c.require(psi <= 0.0, "dropped edge had positive similarity");
    }
  }

  // Exhaustive tree enumeration: the minimum-weight tree is exactly a
  // maximum-importance tree (and the costs are log-linked).
  std::size_t graphs_checked = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::size_t n = 4 + seed % 5;  // up to 8 nodes
    Rng rng(seed);
    std::set<std::pair<NodeId, NodeId>> seen;
    std::vector<WeightedEdge> sparse;
    auto add = [&](NodeId a, NodeId b) {
      if (a == b || sparse.size() >= 14) return;
      if (a > b) std::swap(a, b);
      if (!seen.insert({a, b}).second) return;
      WeightedEdge e;
      e.src = a;
      e.dst = b;
      e.w_star = 0.1 + 1.9 * rng.uniform();
      e.f_star = std::exp(-e.w_star);
      sparse.push_back(e);
    };
    for (std::size_t i = 1; i < n; ++i) {
      add(static_cast<NodeId>(rng.below(i)), static_cast<NodeId>(i));
    }
    for (std::size_t i = 0; i < n; ++i) {
      add(static_cast<NodeId>(rng.below(n)), static_cast<NodeId>(rng.below(n)));
    }
    WeightedQueryGraph wg = make_query_graph(n, std::move(sparse));
    const std::size_t E = wg.edges.size();

    double best_sum = std::numeric_limits<double>::infinity();
    double best_prod = 0.0;
    double prod_at_best_sum = 0.0;
    for (std::size_t mask = 1; mask < (std::size_t(1) << E); ++mask) {
      std::set<NodeId> touched;
      std::map<NodeId, NodeId> parent;
      std::size_t edge_count = 0;
      double sum = 0.0, prod = 1.0;
      bool acyclic = true;
      std::function<NodeId(NodeId)> find = [&](NodeId a) {
        while (parent[a] != a) {
          parent[a] = parent[parent[a]];
          a = parent[a];
        }
        return a;
      };
      for (std::size_t i = 0; i < E && acyclic; ++i) {
        if (!(mask & (std::size_t(1) << i))) continue;
        const WeightedEdge& e = wg.edges[i];
        for (NodeId v : {e.src, e.dst}) {
          if (!touched.count(v)) {
            touched.insert(v);
            parent[v] = v;
          }
        }
        NodeId ra = find(e.src), rb = find(e.dst);
        if (ra == rb) {
          acyclic = false;
        } else {
          parent[rb] = ra;
          ++edge_count;
          sum += e.w_star;
          prod *= e.f_star;
        }
      }
      if (!acyclic) continue;
      if (touched.size() != edge_count + 1) continue;  // forest, not a tree
      if (sum < best_sum) {
        best_sum = sum;
        prod_at_best_sum = prod;
      }
      best_prod = std::max(best_prod, prod);
    }
    if (best_prod == 0.0) continue;
    c.require(std::fabs(std::exp(-best_sum) - best_prod) <= kRelTol * best_prod,
              "min-sum and max-product optima are not log-linked");
    c.require(prod_at_best_sum >= best_prod * (1.0 - kRelTol),
              "the minimum-weight tree misses the maximum importance");
    ++graphs_checked;
  }
  c.require(graphs_checked >= 50, "tree enumeration covered too few graphs");
  return c;
}

Check criterion_search() {
  Check c;

  // Dijkstra vs exhaustive simple-path minima.
  std::function<double(const WeightedQueryGraph&, NodeId, NodeId,
                       std::vector<bool>&, double)>
      brute = [&](const WeightedQueryGraph& wg, NodeId at, NodeId goal,
                  std::vector<bool>& used, double acc) {
        if (at == goal) return acc;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [next, w] : wg.adjacency[at]) {
          if (used[next]) continue;
          used[next] = true;
          best = std::min(best, brute(wg, next, goal, used, acc + w));
          used[next] = false;
        }
        return best;
      };
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::size_t n = 5 + seed % 5;  // up to 9 nodes
    WeightedQueryGraph wg = random_weighted_graph(seed, n);
    for (NodeId s = 0; s < static_cast<NodeId>(n); ++s) {
      for (NodeId t = s + 1; t < static_cast<NodeId>(n); ++t) {
        std::vector<bool> used(n, false);
        used[s] = true;
        double expected = brute(wg, s, t, used, 0.0);
        PathResult r = dijkstra_min_weight_path(wg, s, t);
        c.require(std::fabs(r.cost - expected) < kCostTieTol,
                  "dijkstra disagrees with the brute-force minimum");
      }
    }
  }

  // Approximation guarantee against the exact oracle, 200 instances.
  std::size_t instances = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::size_t n = 6 + seed % 5;  // up to 10 nodes
    WeightedQueryGraph wg = random_weighted_graph(seed + 300, n);
    Rng rng(seed + 900);
    for (std::size_t m : {3, 4}) {
      std::set<NodeId> pick;
      while (pick.size() < m) {
        pick.insert(static_cast<NodeId>(rng.below(n)));
      }
      std::vector<NodeId> terminals(pick.begin(), pick.end());
      SteinerAnswer a = steiner_2approx(wg, terminals);
      double opt = steiner_exact_oracle(wg, terminals);
      double md = static_cast<double>(m);
      c.require(a.cost <= 2.0 * (1.0 - 1.0 / md) * opt + kCostTieTol,
                "tree cost above the approximation bound");
      c.require(a.cost >= opt - kCostTieTol, "tree cost below the optimum");
      ++instances;
    }
  }
  c.require(instances == 200, "expected 200 approximation instances");

  // Two terminals: the tree is the minimum-weight route.
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::size_t n = 6 + seed % 4;
    WeightedQueryGraph wg = random_weighted_graph(seed + 700, n);
    Rng rng(seed);
    NodeId s = static_cast<NodeId>(rng.below(n));
    NodeId t = static_cast<NodeId>(rng.below(n));
    if (s == t) t = static_cast<NodeId>((t + 1) % n);
    SteinerAnswer a = steiner_2approx(wg, {s, t});
    PathResult r = dijkstra_min_weight_path(wg, s, t);
    c.require(std::fabs(a.cost - r.cost) < kCostTieTol,
              "two-terminal tree cost differs from the best route");
  }
  return c;
}

Check criterion_keyphrases() {
  Check c;
  std::vector<std::string> docs = {
      "Graph neural networks learn node representations from graph structure "
      "and node features for classification tasks.",
      "Keyword search over structured data returns compact trees connecting "
      "the keywords through intermediate records.",
      "The quick brown fox jumps over the lazy dog near the river bank "
      "before morning light fades.",
      "database systems store records. database systems answer queries. "
      "indexing accelerates lookups in database systems.",
      "alpha omega alpha omega alpha omega",
      "protein kinase phosphorylates substrate proteins regulating cell "
      "cycle progression and signal transduction cascades",
      "a an the of to in we is are was",
      "short text",
      "sampling textualizing training pooling weighting searching evaluating",
      "one two three four five six seven eight nine ten eleven twelve "
      "thirteen fourteen fifteen sixteen seventeen eighteen nineteen twenty",
      "Path based corpora capture long range structure better than single "
      "hop neighborhoods for language model pretraining on graphs.",
      "x1 y2 z3 tokens with digits mixed 42 alongside plain words"};

  for (const std::string& doc : docs) {
    KeyphraseSet ks = extract_keyphrases(clean_text(doc), 5);
    if (ks.word_scores.empty()) continue;  // no candidates (stopwords only)
    double sum = 0.0;
    for (const auto& [word, score] : ks.word_scores) {
      c.require(score >= 0.0, "negative stationary score");
      sum += score;
    }
    c.require(std::fabs(sum - 1.0) < kSimplexTol,
              "stationary scores do not sum to 1");
    c.require(ks.iterations <= 1000, "power iteration exceeded its cap");
    c.require(ks.residual < kResidualTol, "final L1 residual above tolerance");
  }

  // Swapping two words between documents swaps their scores.
  {
    KeyphraseSet a = extract_keyphrases(
        clean_text("apple banana cherry apple banana apple"), 5);
    KeyphraseSet b = extract_keyphrases(
        clean_text("banana apple cherry banana apple banana"), 5);
    auto score_of = [](const KeyphraseSet& ks, const std::string& w) {
      for (const auto& [word, score] : ks.word_scores) {
        if (word == w) return score;
      }
      return -1.0;
    };
    c.require(std::fabs(score_of(a, "apple") - score_of(b, "banana")) <
                  kSimplexTol,
              "swap symmetry violated for the dominant word");
    c.require(std::fabs(score_of(a, "banana") - score_of(b, "apple")) <
                  kSimplexTol,
              "swap symmetry violated for the secondary word");
    c.require(std::fabs(score_of(a, "cherry") - score_of(b, "cherry")) <
                  kSimplexTol,
              "swap symmetry violated for the untouched word");
  }

  // Identical co-occurrence, larger 1/position mass -> strictly higher.
  {
    KeyphraseSet ks =
        extract_keyphrases(clean_text("alpha omega alpha omega alpha omega"), 5);
    double alpha = -1.0, omega = -1.0;
    for (const auto& [word, score] : ks.word_scores) {
      if (word == "alpha") alpha = score;
      if (word == "omega") omega = score;
    }
    c.require(alpha > 0.0 && omega > 0.0, "position-bias words missing");
    c.require(alpha > omega, "earlier positions not scored strictly higher");
  }
  return c;
}

Check criterion_downstream() {
  Check c;
  using LabelList = std::vector<std::pair<NodeId, std::string>>;

  // Linearly separable classification fixture.
  {
    std::vector<std::string> classes = {"a", "b", "c", "d"};
    LabelList labels;
    NodeId id = 0;
    for (const std::string& cls : classes) {
      for (int i = 0; i < 15; ++i) labels.push_back({id++, cls});
    }
    Rng rng(3);
    EmbeddingTable t;
    t.dim = 8;
    t.vectors.assign(labels.size(), {});
    for (const auto& [node, cls] : labels) {
      std::size_t axis = static_cast<std::size_t>(cls[0] - 'a');
      std::vector<float> v(8, 0.0f);
      for (std::size_t i = 0; i < 8; ++i) {
        v[i] = static_cast<float>((i == axis ? 1.0 : 0.0) +
                                  0.05 * rng.normal());
      }
      t.vectors[node] = v;
    }
    EvalConfig cfg;
    cfg.lr = 0.05;
    MetricsReport r = node_classification_eval(t, labels, 11, cfg);
    c.require(r.mean.macro_f1 >= kSeparableFloor,
              "separable macro-F1 " + std::to_string(r.mean.macro_f1));
  }

  // Planted partition edge validation fixture.
  {
    std::vector<NodeRecord> nodes;
    std::vector<EdgeRecord> edges;
    const std::size_t half = 10;
    for (std::size_t i = 0; i < 2 * half; ++i) {
      nodes.push_back(
          {static_cast<NodeId>(i), "n" + std::to_string(i), "", ""});
    }
    for (std::size_t cl = 0; cl < 2; ++cl) {
      for (std::size_t i = 0; i < half; ++i) {
        for (std::size_t j = i + 1; j < half; ++j) {
          edges.push_back({static_cast<NodeId>(cl * half + i),
                           static_cast<NodeId>(cl * half + j), ""});
        }
      }
    }
    TextAttributedGraph g = make_graph(GraphKind::Homogeneous,
                                       std::move(nodes), std::move(edges));
    Rng rng(13);
    EmbeddingTable t;
    t.dim = 6;
    t.vectors.assign(2 * half, {});
    for (std::size_t i = 0; i < 2 * half; ++i) {
      std::vector<float> v(6, 0.0f);
      for (std::size_t k = 0; k < 6; ++k) {
        v[k] = static_cast<float>(
            (k == (i < half ? 0u : 1u) ? 1.0 : 0.0) + 0.05 * rng.normal());
      }
      t.vectors[i] = v;
    }
    EvalConfig cfg;
    cfg.lr = 0.05;
    MetricsReport r = edge_validation_eval(t, g, 23, cfg);
    c.require(r.folds[0].auc >= kSeparableFloor,
              "planted-partition AUC " + std::to_string(r.folds[0].auc));
  }

  // Chance-level classification: random embeddings, random labels.
  {
    double mean_acc = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Rng rng(seed + 40);
      LabelList labels;
      std::vector<std::string> classes = {"a", "b", "c", "d"};
      for (NodeId i = 0; i < 60; ++i) labels.push_back({i, classes[i % 4]});
      EmbeddingTable t;
      t.dim = 8;
      t.vectors.assign(60, {});
      for (auto& v : t.vectors) {
        v.assign(8, 0.0f);
        for (float& x : v) x = static_cast<float>(rng.normal());
      }
      EvalConfig cfg;
      cfg.lr = 0.05;
      mean_acc += node_classification_eval(t, labels, seed, cfg).mean.accuracy;
    }
    mean_acc /= 5.0;
    c.require(std::fabs(mean_acc - 0.25) <= kChanceAccBand,
              "chance accuracy " + std::to_string(mean_acc));
  }

  // Chance-level edge validation: random graph, random embeddings.
  {
    double mean_auc = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Rng rng(seed + 90);
      std::vector<NodeRecord> nodes;
      std::vector<EdgeRecord> edges;
      const std::size_t n = 24;
      for (std::size_t i = 0; i < n; ++i) {
        nodes.push_back(
            {static_cast<NodeId>(i), "n" + std::to_string(i), "", ""});
      }
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if (rng.uniform() < 0.3) {
            edges.push_back(
                {static_cast<NodeId>(i), static_cast<NodeId>(j), ""});
          }
        }
      }
      TextAttributedGraph g = make_graph(GraphKind::Homogeneous,
                                         std::move(nodes), std::move(edges));
      EmbeddingTable t;
      t.dim = 8;
      t.vectors.assign(n, {});
      for (auto& v : t.vectors) {
        v.assign(8, 0.0f);
        for (float& x : v) x = static_cast<float>(rng.normal());
      }
      EvalConfig cfg;
      cfg.lr = 0.05;
      mean_auc += edge_validation_eval(t, g, seed, cfg).folds[0].auc;
    }
    mean_auc /= 5.0;
    c.require(std::fabs(mean_auc - 0.5) <= kChanceAucBand,
              "chance AUC " + std::to_string(mean_auc));
  }
  return c;
}

Check criterion_determinism() {
  Check c;
  fs::path dir = fs::temp_directory_path() / "pathllm_acceptance_e2e";
  fs::remove_all(dir);
  fs::create_directories(dir);

  // A 30-node two-topic toy TAG.
  std::vector<std::string> db = {
      "indexing structures for database storage engines",
      "transaction processing in distributed databases",
      "query optimization for relational database planners",
      "log structured storage for durable database writes",
      "concurrency control locks inside database kernels"};
  std::vector<std::string> net = {
      "network routing protocols and congestion control",
      "wireless network interference and channel allocation",
      "packet scheduling for low latency network switches",
      "network topology discovery with probe packets",
      "transport protocols for lossy network links"};
  std::string nodes_tsv, edges_tsv, labels_tsv;
  const std::size_t n = 30;
  for (std::size_t i = 0; i < n; ++i) {
    bool is_db = i % 2 == 0;
    const std::vector<std::string>& pool = is_db ? db : net;
    nodes_tsv += "p" + std::to_string(i) + "\tpaper\t" +
                 pool[(i / 2) % pool.size()] + "\n";
    labels_tsv +=
        "p" + std::to_string(i) + "\t" + (is_db ? "db" : "net") + "\n";
  }
  for (std::size_t i = 0; i < n; ++i) {
    edges_tsv += "p" + std::to_string(i) + "\tp" + std::to_string((i + 1) % n) +
                 "\tcites\n";
  }
  for (std::size_t i = 0; i < n; i += 5) {
    edges_tsv += "p" + std::to_string(i) + "\tp" +
                 std::to_string((i + 9) % n) + "\t\n";
  }
  write_text_file((dir / "nodes.tsv").string(), nodes_tsv);
  write_text_file((dir / "edges.tsv").string(), edges_tsv);
  write_text_file((dir / "labels.tsv").string(), labels_tsv);

  auto run_once = [&](const std::string& out_name) {
    PipelineConfig cfg;
    cfg.seed = 42;
    cfg.threads = 1;
    cfg.out_dir = (dir / out_name).string();
    cfg.nodes_path = (dir / "nodes.tsv").string();
    cfg.edges_path = (dir / "edges.tsv").string();
    cfg.kind = GraphKind::Homogeneous;
    cfg.labels_path = (dir / "labels.tsv").string();
    cfg.sampler.b = 30;
    cfg.sampler.L = 4;
    cfg.sampler.k = 3;
    cfg.sampler.ell = 3;
    cfg.model.d = 32;
    cfg.model.h = 4;
    cfg.model.blocks = 2;
    cfg.model.max_len = 64;
    cfg.train.lr = 1e-3;
    cfg.train.batch = 8;
    cfg.train.steps = 60;
    cfg.eval.classification_epochs = 20;
    cfg.eval.edge_epochs = 20;
    cfg.eval.folds = 5;
    cfg.query.keywords = {"database", "network"};
    cfg.query.match = KeywordMatch::TokenExact;
    validate(cfg);
    run_pipeline(cfg);
  };
  run_once("out_a");
  run_once("out_b");

  for (const char* artifact :
       {"paths.jsonl", "corpus.jsonl", "model.bin", "embeddings.tsv",
        "weighted_edges.tsv", "metrics.json", "manifest.json"}) {
    c.require(fs::exists(dir / "out_a" / artifact),
              std::string("missing artifact ") + artifact);
  }

  std::map<std::string, std::string> digest_a, digest_b;
  auto collect = [](const fs::path& root,
                    std::map<std::string, std::string>& out) {
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
      if (!entry.is_regular_file()) continue;
      out[fs::relative(entry.path(), root).string()] =
          read_text_file(entry.path().string());
    }
  };
  collect(dir / "out_a", digest_a);
  collect(dir / "out_b", digest_b);
  c.require(!digest_a.empty(), "first run produced no files");
  c.require(digest_a == digest_b, "artifact directories differ between runs");
  return c;
}

struct Criterion {
  const char* name;
  Check (*run)();
  double budget_seconds;  // 0 = no pinned budget
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"segment cutting vs BFS oracle", criterion_segment_cut, 5.0},
      {"long-path sampling soundness", criterion_sampling_soundness, 30.0},
      {"sequence/span factorization", criterion_factorization, 10.0},
      {"CLM loss, gradients, overfit", criterion_clm_loss, 120.0},
      {"mean pooling identity", criterion_pooling, 0.0},
      {"similarity weighting laws", criterion_weighting, 30.0},
      {"search optimality and bounds", criterion_search, 120.0},
      {"keyphrase ranking properties", criterion_keyphrases, 0.0},
      {"downstream harness sanity", criterion_downstream, 0.0},
      {"end-to-end determinism", criterion_determinism, 180.0},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const Criterion& cr = criteria[i];
    auto t0 = std::chrono::steady_clock::now();
    Check result;
    try {
      result = cr.run();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail = std::string("unexpected exception: ") + e.what();
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (cr.budget_seconds > 0.0 && secs > cr.budget_seconds && result.ok) {
      result.ok = false;
      result.detail = "runtime " + std::to_string(secs) + "s over budget of " +
                      std::to_string(cr.budget_seconds) + "s";
    }
    std::printf("criterion %2zu/%zu %-30s %s (%.2fs)\n", i + 1,
                criteria.size(), cr.name, result.ok ? "PASS" : "FAIL", secs);
    if (!result.ok) {
      std::printf("    -> %s\n", result.detail.c_str());
      ++failures;
    }
  }
  std::printf("acceptance: %zu/%zu criteria passed\n",
              criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
