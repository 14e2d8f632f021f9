#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "pathllm/errors.hpp"
#include "pathllm/graph.hpp"
#include "pathllm/query_graph.hpp"
#include "pathllm/rng.hpp"
#include "pathllm/search.hpp"

using namespace pathllm;

namespace {

TextAttributedGraph text_graph(std::vector<std::string> texts) {
  std::vector<NodeRecord> nodes;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    nodes.push_back({static_cast<NodeId>(i), "n" + std::to_string(i), "",
                     std::move(texts[i])});
  }
  std::vector<EdgeRecord> edges;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    edges.push_back({static_cast<NodeId>(i - 1), static_cast<NodeId>(i), ""});
  }
  return make_graph(GraphKind::Homogeneous, std::move(nodes), std::move(edges));
}

WeightedEdge wedge(NodeId a, NodeId b, double w) {
  WeightedEdge e;
  e.src = a;
  e.dst = b;
  e.w_star = w;
  e.f_star = std::exp(-w);
  return e;
}

// Connected random weighted graph on n nodes.
WeightedQueryGraph random_weighted(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::set<std::pair<NodeId, NodeId>> seen;
  std::vector<WeightedEdge> edges;
  auto add = [&](NodeId a, NodeId b) {
    if (a == b) return;
    if (a > b) std::swap(a, b);
    if (!seen.insert({a, b}).second) return;
    edges.push_back(wedge(a, b, 0.1 + 1.9 * rng.uniform()));
  };
  for (std::size_t i = 1; i < n; ++i) {
    add(static_cast<NodeId>(rng.below(i)), static_cast<NodeId>(i));
  }
  for (std::size_t i = 0; i < 2 * n; ++i) {
    add(static_cast<NodeId>(rng.below(n)), static_cast<NodeId>(rng.below(n)));
  }
  return make_query_graph(n, std::move(edges));
}

double min_path_cost_brute(const WeightedQueryGraph& wg, NodeId at, NodeId goal,
                           std::vector<bool>& used, double acc) {
  if (at == goal) return acc;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [next, w] : wg.adjacency[at]) {
    if (used[next]) continue;
    used[next] = true;
    best = std::min(best, min_path_cost_brute(wg, next, goal, used, acc + w));
    used[next] = false;
  }
  return best;
}

// Validity: the answer's edges form a tree whose leaves are all terminals
// and whose cost matches the summed edge weights.
void check_answer_tree(const SteinerAnswer& a) {
  std::set<NodeId> nodes(a.terminal_nodes.begin(), a.terminal_nodes.end());
  std::map<NodeId, std::size_t> degree;
  double total = 0.0;
  for (const WeightedEdge& e : a.edges) {
    nodes.insert(e.src);
    nodes.insert(e.dst);
    ++degree[e.src];
    ++degree[e.dst];
    total += e.w_star;
  }
  CHECK(std::fabs(total - a.cost) < 1e-12);
  if (a.edges.empty()) return;
  CHECK(a.edges.size() + 1 == nodes.size());  // acyclic and connected

  std::set<NodeId> terminals(a.terminal_nodes.begin(),
                             a.terminal_nodes.end());
  for (NodeId v : nodes) {
    if (degree[v] <= 1) CHECK(terminals.count(v) == 1);
  }

  // Connectivity over the tree edges.
  std::map<NodeId, std::vector<NodeId>> adj;
  for (const WeightedEdge& e : a.edges) {
    adj[e.src].push_back(e.dst);
    adj[e.dst].push_back(e.src);
  }
  std::set<NodeId> visited;
  std::vector<NodeId> stack = {*nodes.begin()};
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    if (!visited.insert(v).second) continue;
    for (NodeId u : adj[v]) stack.push_back(u);
  }
  CHECK(visited.size() == nodes.size());
}

}  // namespace

TEST_CASE("query validation enforces two distinct non-empty keywords") {
  CHECK_THROWS_AS(validate(QuerySpec{{}, KeywordMatch::TokenExact}),
                  ConfigError);
  CHECK_THROWS_AS(validate(QuerySpec{{"one"}, KeywordMatch::TokenExact}),
                  ConfigError);
  CHECK_THROWS_AS(validate(QuerySpec{{"a", ""}, KeywordMatch::TokenExact}),
                  ConfigError);
  CHECK_THROWS_WITH_AS(
      validate(QuerySpec{{"a", "a"}, KeywordMatch::TokenExact}),
      doctest::Contains("duplicate"), ConfigError);
  CHECK_NOTHROW(validate(QuerySpec{{"a", "b"}, KeywordMatch::TokenExact}));
}

TEST_CASE("token matching requires every keyword token and prefers focus") {
  TextAttributedGraph g = text_graph({"Graph search engine design",
                                      "graph search", "database systems",
                                      "database systems"});
  QuerySpec q;
  q.keywords = {"graph search", "database"};
  auto terms = map_keywords_to_terminals(g, q);
  REQUIRE(terms.size() == 2);
  CHECK(terms[0].first == "graph search");
  CHECK(terms[0].second == 1);  // 2/2 tokens beat 2/4
  CHECK(terms[1].second == 2);  // tie with node 3 settles on the lower id

  q.keywords = {"graph design", "engine"};
  terms = map_keywords_to_terminals(g, q);
  CHECK(terms[0].second == 0);  // only node 0 has both tokens

  q.keywords = {"zebra", "graph"};
  CHECK_THROWS_WITH_AS(map_keywords_to_terminals(g, q),
                       doctest::Contains("zebra"), InfeasibleQueryError);

  q.keywords = {"...", "graph"};
  CHECK_THROWS_WITH_AS(map_keywords_to_terminals(g, q),
                       doctest::Contains("no usable tokens"),
                       InfeasibleQueryError);
}

TEST_CASE("substring matching is case-insensitive and spans token breaks") {
  TextAttributedGraph g = text_graph(
      {"Protein Kinase Inhibitor", "kinase", "unrelated text"});
  QuerySpec q;
  q.match = KeywordMatch::SubstringCI;
  q.keywords = {"KINASE INHIB", "kinase"};
  auto terms = map_keywords_to_terminals(g, q);
  CHECK(terms[0].second == 0);  // the phrase crosses a space, only node 0 has it
  CHECK(terms[1].second == 1);  // 6/6 characters beat 6/24

  q.keywords = {"missing phrase", "kinase"};
  CHECK_THROWS_AS(map_keywords_to_terminals(g, q), InfeasibleQueryError);
}

TEST_CASE("the trivial route from a node to itself is that node") {
  WeightedQueryGraph wg = random_weighted(1, 5);
  PathResult r = dijkstra_min_weight_path(wg, 3, 3);
  CHECK(r.nodes == std::vector<NodeId>{3});
  CHECK(r.cost == 0.0);
}

TEST_CASE("dijkstra matches exhaustive path enumeration") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    WeightedQueryGraph wg = random_weighted(seed, 7);
    for (NodeId s = 0; s < 7; ++s) {
      for (NodeId t = s + 1; t < 7; ++t) {
        std::vector<bool> used(7, false);
        used[s] = true;
        double brute = min_path_cost_brute(wg, s, t, used, 0.0);
        PathResult r = dijkstra_min_weight_path(wg, s, t);
        CHECK(std::fabs(r.cost - brute) < 1e-9);
        CHECK(r.nodes.front() == s);
        CHECK(r.nodes.back() == t);
        double walked = 0.0;
        for (std::size_t i = 1; i < r.nodes.size(); ++i) {
          const WeightedEdge* e = wg.find_edge(r.nodes[i - 1], r.nodes[i]);
          REQUIRE(e != nullptr);
          walked += e->w_star;
        }
        CHECK(std::fabs(walked - r.cost) < 1e-9);
      }
    }
  }
}

TEST_CASE("equal-cost routes settle on the smallest node sequence") {
  std::vector<WeightedEdge> edges = {wedge(0, 1, 1.0), wedge(0, 2, 1.0),
                                     wedge(1, 3, 1.0), wedge(2, 3, 1.0)};
  WeightedQueryGraph wg = make_query_graph(4, std::move(edges));
  PathResult r = dijkstra_min_weight_path(wg, 0, 3);
  CHECK(r.nodes == std::vector<NodeId>{0, 1, 3});

  // The smallest first hop is not on any optimal route here.
  edges = {wedge(0, 1, 10.0), wedge(0, 2, 1.0), wedge(1, 3, 1.0),
           wedge(2, 3, 1.0)};
  wg = make_query_graph(4, std::move(edges));
  r = dijkstra_min_weight_path(wg, 0, 3);
  CHECK(r.nodes == std::vector<NodeId>{0, 2, 3});
  CHECK(r.cost == doctest::Approx(2.0));
}

TEST_CASE("unreachable targets raise the infeasibility error") {
  std::vector<WeightedEdge> edges = {wedge(0, 1, 1.0), wedge(2, 3, 1.0)};
  WeightedQueryGraph wg = make_query_graph(4, std::move(edges));
  CHECK_THROWS_AS(dijkstra_min_weight_path(wg, 0, 3), InfeasibleQueryError);
  CHECK_THROWS_AS(dijkstra_min_weight_path(wg, 0, 9), std::invalid_argument);
}

TEST_CASE("two terminals reduce the tree search to the best route") {
  for (std::uint64_t seed = 40; seed < 60; ++seed) {
    WeightedQueryGraph wg = random_weighted(seed, 8);
    Rng rng(seed * 31 + 7);
    NodeId s = static_cast<NodeId>(rng.below(8));
    NodeId t = static_cast<NodeId>(rng.below(8));
    if (s == t) continue;
    PathResult path = dijkstra_min_weight_path(wg, s, t);
    SteinerAnswer tree = steiner_2approx(wg, {s, t});
    check_answer_tree(tree);
    CHECK(std::fabs(tree.cost - path.cost) < 1e-9);
    CHECK(tree.edges.size() == path.nodes.size() - 1);
  }
}

TEST_CASE("a single distinct terminal yields an empty tree") {
  WeightedQueryGraph wg = random_weighted(2, 5);
  SteinerAnswer a = steiner_2approx(wg, {4, 4, 4});
  CHECK(a.terminal_nodes == std::vector<NodeId>{4});
  CHECK(a.edges.empty());
  CHECK(a.cost == 0.0);
  CHECK_THROWS_AS(steiner_2approx(wg, {}), std::invalid_argument);
}

TEST_CASE("the tree cost stays within the approximation guarantee") {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    std::size_t n = 6 + seed % 5;
    WeightedQueryGraph wg = random_weighted(seed, n);
    Rng rng(seed + 500);
    for (std::size_t m : {3, 4}) {
      std::set<NodeId> pick;
      while (pick.size() < m) pick.insert(static_cast<NodeId>(rng.below(n)));
      std::vector<NodeId> terminals(pick.begin(), pick.end());
      SteinerAnswer a = steiner_2approx(wg, terminals);
      check_answer_tree(a);
      double opt = steiner_exact_oracle(wg, terminals);
      double m_d = static_cast<double>(a.terminal_nodes.size());
      CHECK(a.cost <= 2.0 * (1.0 - 1.0 / m_d) * opt + 1e-9);
      CHECK(a.cost >= opt - 1e-9);
      ++checked;
    }
  }
  CHECK(checked == 120);
}

TEST_CASE("a cheap hub beats direct connections between terminals") {
  std::vector<WeightedEdge> edges = {wedge(0, 1, 1.0), wedge(0, 2, 1.0),
                                     wedge(0, 3, 1.0), wedge(1, 2, 2.5),
                                     wedge(1, 3, 2.5), wedge(2, 3, 2.5)};
  WeightedQueryGraph wg = make_query_graph(4, std::move(edges));
  std::vector<NodeId> terminals = {1, 2, 3};
  CHECK(steiner_exact_oracle(wg, terminals) == doctest::Approx(3.0));
  SteinerAnswer a = steiner_2approx(wg, terminals);
  check_answer_tree(a);
  CHECK(a.cost == doctest::Approx(3.0));
  REQUIRE(a.edges.size() == 3);
  for (const WeightedEdge& e : a.edges) CHECK(e.src == 0);
}

TEST_CASE("terminals in different components are infeasible") {
  std::vector<WeightedEdge> edges = {wedge(0, 1, 1.0), wedge(2, 3, 1.0)};
  WeightedQueryGraph wg = make_query_graph(4, std::move(edges));
  CHECK_THROWS_AS(steiner_2approx(wg, {0, 3}), InfeasibleQueryError);
  CHECK_THROWS_AS(steiner_exact_oracle(wg, {0, 3}), InfeasibleQueryError);
}

TEST_CASE("the exact oracle rejects oversized graphs") {
  WeightedQueryGraph wg = random_weighted(9, 17);
  CHECK_THROWS_AS(steiner_exact_oracle(wg, {0, 1}), std::invalid_argument);
}

TEST_CASE("tree distances average over unordered terminal pairs") {
  SteinerAnswer chain;
  chain.terminal_nodes = {1, 2};
  chain.edges = {wedge(0, 1, 0.5), wedge(0, 2, 0.5)};
  AnswerDistance d = answer_distance(chain);
  CHECK(d.pairs == 1);
  CHECK(d.sum == 2.0);
  CHECK(d.mean == 2.0);

  SteinerAnswer star;
  star.terminal_nodes = {1, 2, 3};
  star.edges = {wedge(0, 1, 0.5), wedge(0, 2, 0.5), wedge(0, 3, 0.5)};
  d = answer_distance(star);
  CHECK(d.pairs == 3);
  CHECK(d.sum == 6.0);
  CHECK(d.mean == 2.0);

  SteinerAnswer single;
  single.terminal_nodes = {5};
  d = answer_distance(single);
  CHECK(d.pairs == 0);
  CHECK(d.mean == 0.0);

  SteinerAnswer adjacent;
  adjacent.terminal_nodes = {0, 1};
  adjacent.edges = {wedge(0, 1, 0.5)};
  d = answer_distance(adjacent);
  CHECK(d.mean == 1.0);
}

TEST_CASE("the DOT rendering is deterministic and exact") {
  TextAttributedGraph g = text_graph({"alpha", "beta", "gamma"});
  SteinerAnswer a;
  a.terminals = {{"x", 0}, {"y", 2}};
  a.terminal_nodes = {0, 2};
  a.edges = {wedge(0, 1, 0.5), wedge(1, 2, 0.25)};
  a.cost = 0.75;
  std::string expected =
      "graph answer {\n"
      "  \"n0\" [style=filled, fillcolor=lightblue];\n"
      "  \"n1\";\n"
      "  \"n2\" [style=filled, fillcolor=lightblue];\n"
      "  \"n0\" -- \"n1\" [label=\"f=0.6065306597126334 w=0.5\"];\n"
      "  \"n1\" -- \"n2\" [label=\"f=0.7788007830714049 w=0.25\"];\n"
      "}\n";
  CHECK(export_answer_dot(a, g) == expected);
}

TEST_CASE("the JSON rendering carries terminals, edges, and distances") {
  TextAttributedGraph g = text_graph({"alpha", "beta", "gamma"});
  SteinerAnswer a;
  a.terminals = {{"x", 0}, {"y", 2}};
  a.terminal_nodes = {0, 2};
  a.edges = {wedge(0, 1, 0.5), wedge(1, 2, 0.25)};
  a.cost = 0.75;
  nlohmann::json doc = nlohmann::json::parse(export_answer_json(a, g));
  CHECK(doc["terminals"]["x"] == "n0");
  CHECK(doc["terminals"]["y"] == "n2");
  REQUIRE(doc["edges"].size() == 2);
  CHECK(doc["edges"][0]["src"] == "n0");
  CHECK(doc["edges"][0]["dst"] == "n1");
  CHECK(doc["edges"][1]["w_star"] == 0.25);
  CHECK(doc["cost"] == 0.75);
  CHECK(doc["answer_distance"]["pairs"] == 1);
  CHECK(doc["answer_distance"]["mean"] == 2.0);
  CHECK(doc["answer_distance"]["sum"] == 2.0);
}
