#include "pathllm/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <unordered_set>

#include "json.hpp"
#include "pathllm/errors.hpp"
#include "pathllm/io_util.hpp"
#include "pathllm/text_clean.hpp"
#include "pathllm/vocab.hpp"

namespace pathllm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTol = 1e-9;

std::vector<std::string> keyword_tokens(const std::string& s) {
  std::vector<std::string> out;
  for (const RawToken& tok : tokenize_text(clean_text(s))) {
    if (tok.text.size() == 1 &&
        !std::isalnum(static_cast<unsigned char>(tok.text[0]))) {
      continue;
    }
    out.push_back(tok.text);
  }
  return out;
}

// Plain Dijkstra distances; used by both path search and Voronoi build.
std::vector<double> dijkstra_distances(const WeightedQueryGraph& wg,
                                       NodeId source) {
  std::vector<double> dist(wg.node_count, kInf);
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[source] = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (const auto& [u, w] : wg.adjacency[v]) {
      double nd = d + w;
      if (nd < dist[u]) {
        dist[u] = nd;
        heap.push({nd, u});
      }
    }
  }
  return dist;
}

struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

// Kruskal over explicit edges; ties broken by (weight, src, dst).
std::vector<WeightedEdge> mst_edges(std::size_t n,
                                    std::vector<WeightedEdge> edges,
                                    const std::vector<NodeId>& node_ids) {
  std::sort(edges.begin(), edges.end(),
            [](const WeightedEdge& a, const WeightedEdge& b) {
              if (a.w_star != b.w_star) return a.w_star < b.w_star;
              if (a.src != b.src) return a.src < b.src;
              return a.dst < b.dst;
            });
  std::map<NodeId, std::size_t> index;
  for (std::size_t i = 0; i < node_ids.size(); ++i) index[node_ids[i]] = i;
  DisjointSet ds(n);
  std::vector<WeightedEdge> out;
  for (const WeightedEdge& e : edges) {
    if (ds.unite(index.at(e.src), index.at(e.dst))) out.push_back(e);
  }
  return out;
}

}  // namespace

void validate(const QuerySpec& q) {
  if (q.keywords.size() < 2) {
    throw ConfigError("query needs at least 2 keywords");
  }
  std::set<std::string> seen;
  for (const std::string& kw : q.keywords) {
    if (kw.empty()) throw ConfigError("empty keyword");
    if (!seen.insert(kw).second) {
      throw ConfigError("duplicate keyword: " + kw);
    }
  }
}

std::vector<std::pair<std::string, NodeId>> map_keywords_to_terminals(
    const TextAttributedGraph& g, const QuerySpec& q) {
  std::vector<std::vector<std::string>> node_tokens(g.node_count());
  std::vector<std::string> node_clean_lc(g.node_count());
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    std::string cleaned = clean_text(g.nodes[v].raw_text);
    node_tokens[v] = keyword_tokens(cleaned);
    node_clean_lc[v] = lowercase_ascii(cleaned);
  }

  std::vector<std::pair<std::string, NodeId>> terminals;
  for (const std::string& kw : q.keywords) {
    NodeId best = kNoNode;
    double best_score = -1.0;
    if (q.match == KeywordMatch::TokenExact) {
      std::vector<std::string> want = keyword_tokens(kw);
      if (want.empty()) {
        throw InfeasibleQueryError("keyword has no usable tokens: " + kw);
      }
      for (std::size_t v = 0; v < g.node_count(); ++v) {
        const std::vector<std::string>& have = node_tokens[v];
        if (have.empty()) continue;
        bool all = true;
        std::size_t matched = 0;
        for (const std::string& w : want) {
          std::size_t hits = static_cast<std::size_t>(
              std::count(have.begin(), have.end(), w));
          if (hits == 0) {
            all = false;
            break;
          }
          matched += hits;
        }
        if (!all) continue;
        double score =
            static_cast<double>(matched) / static_cast<double>(have.size());
        if (score > best_score) {
          best_score = score;
          best = static_cast<NodeId>(v);
        }
      }
    } else {
      std::string needle = lowercase_ascii(clean_text(kw));
      if (needle.empty()) {
        throw InfeasibleQueryError("keyword has no usable text: " + kw);
      }
      for (std::size_t v = 0; v < g.node_count(); ++v) {
        if (node_clean_lc[v].empty()) continue;
        if (node_clean_lc[v].find(needle) == std::string::npos) continue;
        double score = static_cast<double>(needle.size()) /
                       static_cast<double>(node_clean_lc[v].size());
        if (score > best_score) {
          best_score = score;
          best = static_cast<NodeId>(v);
        }
      }
    }
    if (best == kNoNode) {
      throw InfeasibleQueryError("keyword matches no node: " + kw);
    }
    terminals.emplace_back(kw, best);
  }
  return terminals;
}

PathResult dijkstra_min_weight_path(const WeightedQueryGraph& wg, NodeId s,
                                    NodeId t) {
  if (s >= wg.node_count || t >= wg.node_count) {
    throw std::invalid_argument("path endpoints out of range");
  }
  PathResult result;
  if (s == t) {
    result.nodes = {s};
    return result;
  }
  std::vector<double> dist_s = dijkstra_distances(wg, s);
  if (dist_s[t] == kInf) {
    throw InfeasibleQueryError("no route between the requested nodes");
  }
  std::vector<double> dist_t = dijkstra_distances(wg, t);
  const double total = dist_s[t];

  // Greedy reconstruction: from s, repeatedly take the smallest-id neighbor
  // still on some minimum-cost route; this yields the lexicographically
  // smallest optimal path.
  result.cost = total;
  result.nodes = {s};
  double acc = 0.0;
  NodeId cur = s;
  while (cur != t) {
    NodeId next = kNoNode;
    double next_w = 0.0;
    for (const auto& [u, w] : wg.adjacency[cur]) {  // ascending ids
      if (acc + w + dist_t[u] <= total + kTieTol) {
        next = u;
        next_w = w;
        break;
      }
    }
    if (next == kNoNode) {
      throw std::logic_error("path reconstruction lost the route");
    }
    acc += next_w;
    cur = next;
    result.nodes.push_back(cur);
  }
  return result;
}

SteinerAnswer steiner_2approx(const WeightedQueryGraph& wg,
                              const std::vector<NodeId>& terminals) {
  if (terminals.empty()) {
    throw std::invalid_argument("no terminals");
  }
  std::vector<NodeId> distinct = terminals;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());
  for (NodeId t : distinct) {
    if (t >= wg.node_count) {
      throw std::invalid_argument("terminal out of range");
    }
  }

  SteinerAnswer answer;
  answer.terminal_nodes = distinct;
  if (distinct.size() == 1) return answer;

  // Voronoi partition by multi-source Dijkstra; ties on distance settle on
  // the smaller terminal id for determinism.
  const std::size_t n = wg.node_count;
  std::vector<double> dist(n, kInf);
  std::vector<NodeId> near(n, kNoNode);
  std::vector<NodeId> parent(n, kNoNode);
  using Item = std::tuple<double, NodeId, NodeId, NodeId>;  // d, term, node, from
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  for (NodeId t : distinct) heap.push({0.0, t, t, kNoNode});
  while (!heap.empty()) {
    auto [d, term, v, from] = heap.top();
    heap.pop();
    if (near[v] != kNoNode) continue;
    dist[v] = d;
    near[v] = term;
    parent[v] = from;
    for (const auto& [u, w] : wg.adjacency[v]) {
      if (near[u] == kNoNode) heap.push({d + w, term, u, v});
    }
  }

  // Terminal distance graph: cheapest bridge per terminal pair.
  struct Bridge {
    double weight = kInf;
    NodeId u = kNoNode, v = kNoNode;  // the base edge crossing the regions
  };
  std::map<std::pair<NodeId, NodeId>, Bridge> aux;
  for (const WeightedEdge& e : wg.edges) {
    if (near[e.src] == kNoNode || near[e.dst] == kNoNode) continue;
    NodeId a = near[e.src];
    NodeId b = near[e.dst];
    if (a == b) continue;
    double w = dist[e.src] + e.w_star + dist[e.dst];
    NodeId u = e.src, v = e.dst;
    if (a > b) {
      std::swap(a, b);
    }
    Bridge& slot = aux[{a, b}];
    if (w < slot.weight) {
      slot.weight = w;
      slot.u = u;
      slot.v = v;
    }
  }

  std::vector<WeightedEdge> aux_edges;
  for (const auto& [pair, bridge] : aux) {
    WeightedEdge e;
    e.src = pair.first;
    e.dst = pair.second;
    e.w_star = bridge.weight;
    aux_edges.push_back(e);
  }
  std::vector<WeightedEdge> aux_mst =
      mst_edges(distinct.size(), aux_edges, distinct);
  if (aux_mst.size() + 1 != distinct.size()) {
    throw InfeasibleQueryError("keywords map to disconnected regions");
  }

  // Expand each auxiliary edge to its base path through the bridge edge.
  std::set<std::pair<NodeId, NodeId>> tree_pairs;
  auto add_pair = [&tree_pairs](NodeId a, NodeId b) {
    if (a > b) std::swap(a, b);
    tree_pairs.insert({a, b});
  };
  for (const WeightedEdge& ae : aux_mst) {
    const Bridge& bridge = aux.at({ae.src, ae.dst});
    add_pair(bridge.u, bridge.v);
    for (NodeId walk : {bridge.u, bridge.v}) {
      NodeId cur = walk;
      while (parent[cur] != kNoNode) {
        add_pair(cur, parent[cur]);
        cur = parent[cur];
      }
    }
  }

  // MST of the expanded subgraph, then prune non-terminal leaves.
  std::set<NodeId> node_set(distinct.begin(), distinct.end());
  std::vector<WeightedEdge> sub_edges;
  for (const auto& [a, b] : tree_pairs) {
    const WeightedEdge* e = wg.find_edge(a, b);
    if (!e) throw std::logic_error("expanded edge missing from graph");
    sub_edges.push_back(*e);
    node_set.insert(a);
    node_set.insert(b);
  }
  std::vector<NodeId> sub_nodes(node_set.begin(), node_set.end());
  std::vector<WeightedEdge> tree =
      mst_edges(sub_nodes.size(), sub_edges, sub_nodes);

  std::set<NodeId> terminal_set(distinct.begin(), distinct.end());
  bool pruned = true;
  while (pruned) {
    pruned = false;
    std::map<NodeId, std::size_t> degree;
    for (const WeightedEdge& e : tree) {
      ++degree[e.src];
      ++degree[e.dst];
    }
    std::vector<WeightedEdge> kept;
    for (const WeightedEdge& e : tree) {
      bool drop =
          (degree[e.src] == 1 && !terminal_set.count(e.src)) ||
          (degree[e.dst] == 1 && !terminal_set.count(e.dst));
      if (drop) {
        pruned = true;
      } else {
        kept.push_back(e);
      }
    }
    tree = std::move(kept);
  }

  std::sort(tree.begin(), tree.end(),
            [](const WeightedEdge& a, const WeightedEdge& b) {
              return a.src != b.src ? a.src < b.src : a.dst < b.dst;
            });
  for (const WeightedEdge& e : tree) answer.cost += e.w_star;
  answer.edges = std::move(tree);
  return answer;
}

double steiner_exact_oracle(const WeightedQueryGraph& wg,
                            const std::vector<NodeId>& terminals) {
  if (wg.node_count > 16) {
    throw std::invalid_argument("exact oracle limited to 16 nodes");
  }
  if (terminals.empty()) throw std::invalid_argument("no terminals");
  std::uint32_t required = 0;
  for (NodeId t : terminals) required |= 1u << t;

  double best = kInf;
  const std::uint32_t full = 1u << wg.node_count;
  for (std::uint32_t mask = 0; mask < full; ++mask) {
    if ((mask & required) != required) continue;
    std::vector<NodeId> nodes;
    for (std::uint32_t v = 0; v < wg.node_count; ++v) {
      if (mask & (1u << v)) nodes.push_back(v);
    }
    std::vector<WeightedEdge> edges;
    for (const WeightedEdge& e : wg.edges) {
      if ((mask & (1u << e.src)) && (mask & (1u << e.dst))) {
        edges.push_back(e);
      }
    }
    std::vector<WeightedEdge> mst = mst_edges(nodes.size(), edges, nodes);
    if (mst.size() + 1 != nodes.size()) continue;  // induced subgraph not connected
    double cost = 0;
    for (const WeightedEdge& e : mst) cost += e.w_star;
    best = std::min(best, cost);
  }
  if (best == kInf) {
    throw InfeasibleQueryError("terminals span disconnected components");
  }
  return best;
}

AnswerDistance answer_distance(const SteinerAnswer& answer) {
  AnswerDistance out;
  std::vector<NodeId> terms;
  if (!answer.terminals.empty()) {
    for (const auto& [kw, v] : answer.terminals) terms.push_back(v);
  } else {
    terms = answer.terminal_nodes;
  }
  if (terms.size() < 2) return out;

  std::map<NodeId, std::vector<NodeId>> adj;
  for (const WeightedEdge& e : answer.edges) {
    adj[e.src].push_back(e.dst);
    adj[e.dst].push_back(e.src);
  }
  auto hops = [&adj](NodeId from, NodeId to) -> double {
    if (from == to) return 0.0;
    std::map<NodeId, int> dist;
    dist[from] = 0;
    std::vector<NodeId> queue{from};
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      NodeId v = queue[qi];
      if (v == to) return dist[v];
      auto it = adj.find(v);
      if (it == adj.end()) continue;
      for (NodeId u : it->second) {
        if (!dist.count(u)) {
          dist[u] = dist[v] + 1;
          queue.push_back(u);
        }
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      out.sum += hops(terms[i], terms[j]);
      ++out.pairs;
    }
  }
  out.mean = out.sum / static_cast<double>(out.pairs);
  return out;
}

std::string export_answer_dot(const SteinerAnswer& answer,
                              const TextAttributedGraph& g) {
  std::set<NodeId> nodes(answer.terminal_nodes.begin(),
                         answer.terminal_nodes.end());
  for (const WeightedEdge& e : answer.edges) {
    nodes.insert(e.src);
    nodes.insert(e.dst);
  }
  std::set<NodeId> terminal_set(answer.terminal_nodes.begin(),
                                answer.terminal_nodes.end());
  std::string out = "graph answer {\n";
  for (NodeId v : nodes) {
    out += "  \"";
    out += g.nodes[v].orig_id;
    out += "\"";
    if (terminal_set.count(v)) {
      out += " [style=filled, fillcolor=lightblue]";
    }
    out += ";\n";
  }
  for (const WeightedEdge& e : answer.edges) {
    out += "  \"";
    out += g.nodes[e.src].orig_id;
    out += "\" -- \"";
    out += g.nodes[e.dst].orig_id;
    out += "\" [label=\"f=";
    out += format_double(e.f_star);
    out += " w=";
    out += format_double(e.w_star);
    out += "\"];\n";
  }
  out += "}\n";
  return out;
}

std::string export_answer_json(const SteinerAnswer& answer,
                               const TextAttributedGraph& g) {
  AnswerDistance dist = answer_distance(answer);
  nlohmann::json doc;
  doc["terminals"] = nlohmann::json::object();
  for (const auto& [keyword, node] : answer.terminals) {
    doc["terminals"][keyword] = g.nodes[node].orig_id;
  }
  nlohmann::json edge_list = nlohmann::json::array();
  for (const WeightedEdge& e : answer.edges) {
    edge_list.push_back({{"src", g.nodes[e.src].orig_id},
                         {"dst", g.nodes[e.dst].orig_id},
                         {"f_star", e.f_star},
                         {"w_star", e.w_star}});
  }
  doc["edges"] = edge_list;
  doc["cost"] = answer.cost;
  doc["answer_distance"] = {
      {"mean", dist.mean}, {"sum", dist.sum}, {"pairs", dist.pairs}};
  return doc.dump(2) + "\n";
}

}  // namespace pathllm
