#include "pathllm/pipeline.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <string>

#include "json.hpp"
#include "pathllm/embedding.hpp"
#include "pathllm/errors.hpp"
#include "pathllm/io_util.hpp"
#include "pathllm/keyphrase.hpp"
#include "pathllm/parallel.hpp"
#include "pathllm/query_graph.hpp"
#include "pathllm/rng.hpp"
#include "pathllm/text_clean.hpp"
#include "pathllm/textualize.hpp"
#include "pathllm/vocab.hpp"

namespace pathllm {

namespace {

using nlohmann::json;

void expect_keys(const json& obj, const std::string& where,
                 std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* name : allowed) {
      if (key == name) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError("config: unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config: bad value for '") + key + "'");
  }
}

std::string artifact(const PipelineConfig& cfg, const char* name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

// manifest.json holds logical names and content hashes only, never
// filesystem paths, so identical runs produce identical bytes.
json load_manifest(const std::string& path) {
  if (!file_exists(path)) return json::object();
  try {
    json doc = json::parse(read_text_file(path));
    if (doc.is_object()) return doc;
  } catch (const json::exception&) {
  }
  return json::object();
}

struct PhaseRunner {
  const PipelineConfig& cfg;
  std::string manifest_path;
  json manifest;
  PipelineResult result;

  explicit PhaseRunner(const PipelineConfig& config)
      : cfg(config), manifest_path(artifact(config, "manifest.json")) {
    manifest = load_manifest(manifest_path);
    if (!manifest.contains("phases") || !manifest["phases"].is_object()) {
      manifest["phases"] = json::object();
    }
  }

  bool up_to_date(const std::string& name, const json& inputs,
                  const std::map<std::string, std::string>& outputs) const {
    const json& phases = manifest.at("phases");
    if (!phases.contains(name)) return false;
    const json& entry = phases.at(name);
    if (!entry.is_object() || !entry.contains("inputs") ||
        entry.at("inputs") != inputs) {
      return false;
    }
    if (!entry.contains("outputs") || !entry.at("outputs").is_object()) {
      return false;
    }
    const json& recorded = entry.at("outputs");
    if (recorded.size() != outputs.size()) return false;
    for (const auto& [key, path] : outputs) {
      std::string h = hash_file_hex(path);
      if (h.empty() || !recorded.contains(key) ||
          recorded.at(key).get<std::string>() != h) {
        return false;
      }
    }
    return true;
  }

  // Runs `body` unless the manifest already covers it, then records the
  // output hashes and persists the manifest so a crash later is resumable.
  void phase(const std::string& name, const json& inputs,
             const std::map<std::string, std::string>& outputs,
             const std::function<void()>& body) {
    if (up_to_date(name, inputs, outputs)) {
      result.phases.push_back({name, true});
      return;
    }
    try {
      body();
    } catch (const ConfigError&) {
      throw;
    } catch (const InfeasibleQueryError&) {
      throw;
    } catch (const std::exception& e) {
      throw PhaseError(name, e.what());
    }
    json out_hashes = json::object();
    for (const auto& [key, path] : outputs) {
      std::string h = hash_file_hex(path);
      if (h.empty()) {
        throw PhaseError(name, "expected output missing: " + key);
      }
      out_hashes[key] = h;
    }
    manifest["phases"][name] = {{"inputs", inputs}, {"outputs", out_hashes}};
    write_text_file(manifest_path, manifest.dump(2) + "\n");
    result.phases.push_back({name, false});
  }
};

json sampler_params(const PipelineConfig& cfg) {
  return {{"b", cfg.sampler.b},      {"L", cfg.sampler.L},
          {"k", cfg.sampler.k},      {"ell", cfg.sampler.ell},
          {"mode", mode_tag(cfg.sampler.mode)}, {"seed", cfg.seed}};
}

json textualizer_params(const PipelineConfig& cfg) {
  json params = {{"max_phrases", cfg.max_phrases}};
  params["stopwords"] = cfg.stopwords_path.empty()
                            ? std::string("builtin")
                            : hash_file_hex(cfg.stopwords_path);
  return params;
}

json train_params(const PipelineConfig& cfg) {
  return {{"d", cfg.model.d},
          {"h", cfg.model.h},
          {"blocks", cfg.model.blocks},
          {"max_len", cfg.model.max_len},
          {"precision", cfg.precision},
          {"lr", cfg.train.lr},
          {"batch", cfg.train.batch},
          {"steps", cfg.train.steps},
          {"seed", cfg.seed}};
}

StopwordList pipeline_stopwords(const PipelineConfig& cfg) {
  return cfg.stopwords_path.empty() ? default_stopwords()
                                    : load_stopwords(cfg.stopwords_path);
}

// The embedding input text for a node: its keyphrases joined by ", ",
// recomputed exactly as the textualize phase computed them.
std::string node_embedding_text(const std::string& raw_text,
                                std::size_t max_phrases,
                                const StopwordList& stopwords) {
  KeyphraseSet set =
      extract_keyphrases(clean_text(raw_text), max_phrases, stopwords);
  std::string text;
  for (std::size_t i = 0; i < set.phrases.size(); ++i) {
    if (i > 0) text += ", ";
    text += set.phrases[i].first;
  }
  return text;
}

}  // namespace

PipelineConfig load_pipeline_config(const std::string& path) {
  if (!file_exists(path)) {
    throw ConfigError("config: cannot read " + path);
  }
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  expect_keys(doc, "the top level",
              {"seed", "threads", "out_dir", "graph", "labels", "sampler",
               "textualizer", "model", "train", "eval", "query"});

  PipelineConfig cfg;
  read_field(doc, "seed", cfg.seed);
  read_field(doc, "threads", cfg.threads);
  read_field(doc, "out_dir", cfg.out_dir);
  read_field(doc, "labels", cfg.labels_path);

  if (!doc.contains("graph")) throw ConfigError("config: missing 'graph'");
  const json& graph = doc.at("graph");
  expect_keys(graph, "'graph'", {"nodes", "edges", "kind"});
  read_field(graph, "nodes", cfg.nodes_path);
  read_field(graph, "edges", cfg.edges_path);
  std::string kind = "homogeneous";
  read_field(graph, "kind", kind);
  if (kind == "homogeneous") {
    cfg.kind = GraphKind::Homogeneous;
  } else if (kind == "heterogeneous") {
    cfg.kind = GraphKind::Heterogeneous;
  } else {
    throw ConfigError("config: graph kind must be homogeneous or "
                      "heterogeneous, got '" + kind + "'");
  }

  if (doc.contains("sampler")) {
    const json& s = doc.at("sampler");
    expect_keys(s, "'sampler'", {"b", "L", "k", "ell", "mode"});
    read_field(s, "b", cfg.sampler.b);
    read_field(s, "L", cfg.sampler.L);
    read_field(s, "k", cfg.sampler.k);
    read_field(s, "ell", cfg.sampler.ell);
    std::string mode;
    read_field(s, "mode", mode);
    if (!mode.empty()) cfg.sampler.mode = parse_mode_tag(mode);
  }

  if (doc.contains("textualizer")) {
    const json& t = doc.at("textualizer");
    expect_keys(t, "'textualizer'", {"max_phrases", "stopwords"});
    read_field(t, "max_phrases", cfg.max_phrases);
    read_field(t, "stopwords", cfg.stopwords_path);
  }

  if (doc.contains("model")) {
    const json& m = doc.at("model");
    expect_keys(m, "'model'", {"d", "h", "blocks", "max_len", "precision"});
    read_field(m, "d", cfg.model.d);
    read_field(m, "h", cfg.model.h);
    read_field(m, "blocks", cfg.model.blocks);
    read_field(m, "max_len", cfg.model.max_len);
    read_field(m, "precision", cfg.precision);
  }

  if (doc.contains("train")) {
    const json& t = doc.at("train");
    expect_keys(t, "'train'", {"lr", "batch", "steps"});
    read_field(t, "lr", cfg.train.lr);
    read_field(t, "batch", cfg.train.batch);
    read_field(t, "steps", cfg.train.steps);
  }

  if (doc.contains("eval")) {
    const json& e = doc.at("eval");
    expect_keys(e, "'eval'",
                {"classification_epochs", "edge_epochs", "lr", "batch",
                 "folds"});
    read_field(e, "classification_epochs", cfg.eval.classification_epochs);
    read_field(e, "edge_epochs", cfg.eval.edge_epochs);
    read_field(e, "lr", cfg.eval.lr);
    read_field(e, "batch", cfg.eval.batch);
    read_field(e, "folds", cfg.eval.folds);
  }

  if (doc.contains("query")) {
    const json& q = doc.at("query");
    expect_keys(q, "'query'", {"keywords", "match"});
    read_field(q, "keywords", cfg.query.keywords);
    std::string match = "token";
    read_field(q, "match", match);
    if (match == "token") {
      cfg.query.match = KeywordMatch::TokenExact;
    } else if (match == "substring") {
      cfg.query.match = KeywordMatch::SubstringCI;
    } else {
      throw ConfigError("config: query match must be token or substring");
    }
  }
  return cfg;
}

void validate(const PipelineConfig& cfg) {
  if (cfg.out_dir.empty()) throw ConfigError("config: out_dir is required");
  if (cfg.nodes_path.empty() || cfg.edges_path.empty()) {
    throw ConfigError("config: graph nodes and edges paths are required");
  }
  for (const std::string& path : {cfg.nodes_path, cfg.edges_path}) {
    if (!file_exists(path)) {
      throw ConfigError("config: input not found: " + path);
    }
  }
  if (!cfg.labels_path.empty() && !file_exists(cfg.labels_path)) {
    throw ConfigError("config: labels not found: " + cfg.labels_path);
  }
  if (!cfg.stopwords_path.empty() && !file_exists(cfg.stopwords_path)) {
    throw ConfigError("config: stopwords not found: " + cfg.stopwords_path);
  }
  validate(cfg.sampler);
  validate(cfg.train);
  if (cfg.max_phrases < 1) {
    throw ConfigError("config: max_phrases must be >= 1");
  }
  if (cfg.precision != "f32" && cfg.precision != "f64") {
    throw ConfigError("config: precision must be f32 or f64");
  }
  if (cfg.model.d == 0 || cfg.model.h == 0 || cfg.model.d % cfg.model.h != 0) {
    throw ConfigError("config: model dim must divide into heads");
  }
  if (cfg.model.blocks == 0 || cfg.model.max_len < 4) {
    throw ConfigError("config: model blocks must be >= 1, max_len >= 4");
  }
  if (cfg.eval.folds < 2) throw ConfigError("config: eval folds must be >= 2");
  if (!cfg.query.keywords.empty()) validate(cfg.query);
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  validate(cfg);
  std::filesystem::create_directories(cfg.out_dir);

  TextAttributedGraph g = load_graph(cfg.nodes_path, cfg.edges_path, cfg.kind);
  const std::string nodes_hash = hash_file_hex(cfg.nodes_path);
  const std::string edges_hash = hash_file_hex(cfg.edges_path);

  const std::string paths_file = artifact(cfg, "paths.jsonl");
  const std::string corpus_file = artifact(cfg, "corpus.jsonl");
  const std::string model_file = artifact(cfg, "model.bin");
  const std::string vocab_file = artifact(cfg, "vocab.tsv");
  const std::string emb_file = artifact(cfg, "embeddings.tsv");
  const std::string weights_file = artifact(cfg, "weighted_edges.tsv");
  const std::string metrics_file = artifact(cfg, "metrics.json");

  PhaseRunner runner(cfg);

  {
    json inputs = {{"graph.nodes", nodes_hash},
                   {"graph.edges", edges_hash},
                   {"params", sampler_params(cfg)}};
    runner.phase("sample", inputs, {{"paths.jsonl", paths_file}}, [&] {
      SamplerConfig sampler = cfg.sampler;
      sampler.seed = derive_seed(cfg.seed, "sample");
      SampleDiagnostics diag;
      std::vector<ShortestPathSegment> segments =
          sample_segments(g, sampler, &diag);
      if (segments.empty()) {
        throw std::runtime_error(diag.message.empty() ? "no paths sampled"
                                                      : diag.message);
      }
      write_paths_jsonl(paths_file, segments, sampler.mode);
    });
  }

  {
    json inputs = {{"graph.nodes", nodes_hash},
                   {"graph.edges", edges_hash},
                   {"paths.jsonl", hash_file_hex(paths_file)},
                   {"params", textualizer_params(cfg)}};
    runner.phase("textualize", inputs, {{"corpus.jsonl", corpus_file}}, [&] {
      std::vector<ShortestPathSegment> segments = read_paths_jsonl(paths_file);
      TextualizerConfig tcfg;
      tcfg.max_phrases = cfg.max_phrases;
      tcfg.stopwords = pipeline_stopwords(cfg);
      tcfg.threads = cfg.threads;
      Corpus corpus = build_corpus(segments, g, tcfg);
      write_corpus_jsonl(corpus_file, corpus.entries);
    });
  }

  {
    json inputs = {{"corpus.jsonl", hash_file_hex(corpus_file)},
                   {"params", train_params(cfg)}};
    runner.phase(
        "train", inputs,
        {{"model.bin", model_file}, {"vocab.tsv", vocab_file}}, [&] {
          std::vector<TextualizedPath> entries = read_corpus_jsonl(corpus_file);
          Vocab vocab = build_vocab(entries);
          ModelConfig mcfg = cfg.model;
          mcfg.vocab = static_cast<std::uint32_t>(vocab.size());
          std::vector<std::vector<TokenId>> sequences;
          sequences.reserve(entries.size());
          for (const TextualizedPath& entry : entries) {
            sequences.push_back(encode(vocab, entry.text, mcfg.max_len));
          }
          TrainConfig tcfg = cfg.train;
          tcfg.seed = derive_seed(cfg.seed, "train");
          if (cfg.precision == "f64") {
            ToyModel<double> model(mcfg);
            model.init_parameters(derive_seed(cfg.seed, "init"));
            train(model, sequences, tcfg);
            save_model(model, model_file);
          } else {
            ToyModel<float> model(mcfg);
            model.init_parameters(derive_seed(cfg.seed, "init"));
            train(model, sequences, tcfg);
            save_model(model, model_file);
          }
          save_vocab(vocab, vocab_file);
        });
  }

  {
    json inputs = {{"graph.nodes", nodes_hash},
                   {"model.bin", hash_file_hex(model_file)},
                   {"vocab.tsv", hash_file_hex(vocab_file)},
                   {"params", textualizer_params(cfg)}};
    runner.phase("embed", inputs, {{"embeddings.tsv", emb_file}}, [&] {
      ToyModel<float> model = load_model(model_file);
      Vocab vocab = load_vocab(vocab_file);
      StopwordList stopwords = pipeline_stopwords(cfg);
      EmbeddingTable table;
      table.dim = model.cfg.d;
      table.provenance = EmbeddingProvenance::ToyModel;
      table.vectors.resize(g.node_count());
      parallel_for(g.node_count(), cfg.threads, [&](std::size_t v) {
        std::string text = node_embedding_text(g.nodes[v].raw_text,
                                               cfg.max_phrases, stopwords);
        table.vectors[v] =
            extract_node_embedding(model, text, vocab).first;
      });
      export_embeddings(table, emb_file);
    });
  }

  {
    json inputs = {{"graph.edges", edges_hash},
                   {"embeddings.tsv", hash_file_hex(emb_file)}};
    runner.phase("weight", inputs, {{"weighted_edges.tsv", weights_file}},
                 [&] {
                   EmbeddingTable table = import_embeddings(emb_file);
                   WeightedQueryGraph wg = build_query_graph(g, table);
                   write_weighted_edges(wg, weights_file);
                 });
  }

  if (!cfg.query.keywords.empty()) {
    json query_params = {{"keywords", cfg.query.keywords},
                         {"match", cfg.query.match == KeywordMatch::TokenExact
                                       ? "token"
                                       : "substring"}};
    json inputs = {{"graph.nodes", nodes_hash},
                   {"graph.edges", edges_hash},
                   {"weighted_edges.tsv", hash_file_hex(weights_file)},
                   {"params", query_params}};
    const std::string dot_file = artifact(cfg, "answer.dot");
    const std::string answer_file = artifact(cfg, "answer.json");
    runner.phase(
        "search", inputs,
        {{"answer.dot", dot_file}, {"answer.json", answer_file}}, [&] {
          WeightedQueryGraph wg =
              read_weighted_edges(weights_file, g.node_count());
          std::vector<std::pair<std::string, NodeId>> terminals =
              map_keywords_to_terminals(g, cfg.query);
          std::vector<NodeId> nodes;
          for (const auto& [keyword, node] : terminals) nodes.push_back(node);
          SteinerAnswer answer = steiner_2approx(wg, nodes);
          answer.terminals = terminals;
          write_text_file(dot_file, export_answer_dot(answer, g));
          write_text_file(answer_file, export_answer_json(answer, g));
        });
  }

  {
    json eval_params = {{"classification_epochs", cfg.eval.classification_epochs},
                        {"edge_epochs", cfg.eval.edge_epochs},
                        {"lr", cfg.eval.lr},
                        {"batch", cfg.eval.batch},
                        {"folds", cfg.eval.folds},
                        {"seed", cfg.seed}};
    json inputs = {{"graph.nodes", nodes_hash},
                   {"graph.edges", edges_hash},
                   {"embeddings.tsv", hash_file_hex(emb_file)},
                   {"params", eval_params}};
    inputs["labels"] =
        cfg.labels_path.empty() ? std::string() : hash_file_hex(cfg.labels_path);
    runner.phase("eval", inputs, {{"metrics.json", metrics_file}}, [&] {
      EmbeddingTable table = import_embeddings(emb_file);
      MetricsReport classification;
      bool have_labels = !cfg.labels_path.empty();
      if (have_labels) {
        std::vector<std::pair<NodeId, std::string>> labels =
            load_labels(cfg.labels_path, g);
        classification = node_classification_eval(
            table, labels, derive_seed(cfg.seed, "eval-cls"), cfg.eval);
      }
      MetricsReport edges = edge_validation_eval(
          table, g, derive_seed(cfg.seed, "eval-edge"), cfg.eval);
      write_metrics_json(metrics_file,
                         have_labels ? &classification : nullptr, &edges,
                         cfg.seed, cfg.eval);
    });
  }

  return runner.result;
}

}  // namespace pathllm
