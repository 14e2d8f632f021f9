#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pathllm/embedding.hpp"
#include "pathllm/errors.hpp"
#include "pathllm/eval.hpp"
#include "pathllm/graph.hpp"
#include "pathllm/io_util.hpp"
#include "pathllm/keyphrase.hpp"
#include "pathllm/model.hpp"
#include "pathllm/parallel.hpp"
#include "pathllm/pipeline.hpp"
#include "pathllm/query_graph.hpp"
#include "pathllm/rng.hpp"
#include "pathllm/sampling.hpp"
#include "pathllm/search.hpp"
#include "pathllm/text_clean.hpp"
#include "pathllm/textualize.hpp"
#include "pathllm/train.hpp"
#include "pathllm/vocab.hpp"

namespace {

using namespace pathllm;

struct GraphArgs {
  std::string nodes;
  std::string edges;
  std::string kind = "homogeneous";
};

void add_graph_options(CLI::App* cmd, GraphArgs& args) {
  cmd->add_option("--nodes", args.nodes, "node table (tsv)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--edges", args.edges, "edge table (tsv)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--kind", args.kind, "graph kind")
      ->check(CLI::IsMember({"homogeneous", "heterogeneous"}));
}

TextAttributedGraph load(const GraphArgs& args) {
  GraphKind kind = args.kind == "heterogeneous" ? GraphKind::Heterogeneous
                                                : GraphKind::Homogeneous;
  return load_graph(args.nodes, args.edges, kind);
}

std::vector<std::string> split_keywords(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t comma = csv.find(',', start);
    if (comma == std::string::npos) comma = csv.size();
    std::string word = csv.substr(start, comma - start);
    std::size_t first = word.find_first_not_of(" \t");
    std::size_t last = word.find_last_not_of(" \t");
    if (first != std::string::npos) {
      out.push_back(word.substr(first, last - first + 1));
    }
    start = comma + 1;
  }
  return out;
}

void ensure_parent_dir(const std::string& path) {
  std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

int dispatch(int argc, char** argv) {
  CLI::App app{"text-attributed graph embeddings from sampled shortest paths"};
  app.require_subcommand(1);

  // sample
  GraphArgs sample_graph;
  SamplerConfig sampler;
  std::string sample_mode = "l2sp";
  std::string sample_out = "paths.jsonl";
  CLI::App* sample_cmd =
      app.add_subcommand("sample", "sample path segments from a graph");
  add_graph_options(sample_cmd, sample_graph);
  sample_cmd->add_option("--b", sampler.b, "source nodes to draw");
  sample_cmd->add_option("--L", sampler.L, "minimum long-path hops");
  sample_cmd->add_option("--k", sampler.k, "shortest paths per pair");
  sample_cmd->add_option("--ell", sampler.ell, "segment length in nodes");
  sample_cmd->add_option("--mode", sample_mode, "l2sp|rw|rssp|1hop");
  sample_cmd->add_option("--seed", sampler.seed, "sampler seed");
  sample_cmd->add_option("--out", sample_out, "output jsonl");

  // textualize
  GraphArgs text_graph;
  std::string text_paths;
  std::string text_out = "corpus.jsonl";
  std::size_t text_max_phrases = 5;
  std::string text_stopwords;
  std::size_t text_threads = 1;
  CLI::App* text_cmd =
      app.add_subcommand("textualize", "render path segments as text");
  add_graph_options(text_cmd, text_graph);
  text_cmd->add_option("--paths", text_paths, "paths.jsonl from sample")
      ->required()
      ->check(CLI::ExistingFile);
  text_cmd->add_option("--max-phrases", text_max_phrases,
                       "keyphrases per node");
  text_cmd->add_option("--stopwords", text_stopwords, "stopword list file")
      ->check(CLI::ExistingFile);
  text_cmd->add_option("--threads", text_threads, "worker threads");
  text_cmd->add_option("--out", text_out, "output jsonl");

  // train
  std::string train_corpus;
  std::string train_model_out = "model.bin";
  std::string train_vocab_out = "vocab.tsv";
  ModelConfig model_cfg;
  TrainConfig train_cfg;
  std::string train_precision = "f32";
  CLI::App* train_cmd =
      app.add_subcommand("train", "fit the toy causal language model");
  train_cmd->add_option("--corpus", train_corpus, "corpus.jsonl")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--d", model_cfg.d, "model width");
  train_cmd->add_option("--heads", model_cfg.h, "attention heads");
  train_cmd->add_option("--blocks", model_cfg.blocks, "transformer blocks");
  train_cmd->add_option("--max-len", model_cfg.max_len, "context length");
  train_cmd->add_option("--lr", train_cfg.lr, "learning rate");
  train_cmd->add_option("--batch", train_cfg.batch, "batch size");
  train_cmd->add_option("--steps", train_cfg.steps, "training steps");
  train_cmd->add_option("--seed", train_cfg.seed, "init and shuffle seed");
  train_cmd->add_option("--precision", train_precision, "f32|f64")
      ->check(CLI::IsMember({"f32", "f64"}));
  train_cmd->add_option("--model-out", train_model_out, "model file");
  train_cmd->add_option("--vocab-out", train_vocab_out, "vocab file");

  // embed
  GraphArgs embed_graph;
  std::string embed_model;
  std::string embed_vocab;
  std::string embed_out = "embeddings.tsv";
  std::string embed_bin_out;
  std::size_t embed_max_phrases = 5;
  std::string embed_stopwords;
  std::size_t embed_threads = 1;
  CLI::App* embed_cmd =
      app.add_subcommand("embed", "extract node embeddings from the model");
  add_graph_options(embed_cmd, embed_graph);
  embed_cmd->add_option("--model", embed_model, "model.bin")
      ->required()
      ->check(CLI::ExistingFile);
  embed_cmd->add_option("--vocab", embed_vocab, "vocab.tsv")
      ->required()
      ->check(CLI::ExistingFile);
  embed_cmd->add_option("--max-phrases", embed_max_phrases,
                        "keyphrases per node");
  embed_cmd->add_option("--stopwords", embed_stopwords, "stopword list file")
      ->check(CLI::ExistingFile);
  embed_cmd->add_option("--threads", embed_threads, "worker threads");
  embed_cmd->add_option("--out", embed_out, "embeddings tsv");
  embed_cmd->add_option("--bin", embed_bin_out, "optional binary copy");

  // weight
  GraphArgs weight_graph;
  std::string weight_embeddings;
  std::string weight_out = "weighted_edges.tsv";
  bool weight_uniform = false;
  CLI::App* weight_cmd =
      app.add_subcommand("weight", "re-weight edges by embedding similarity");
  add_graph_options(weight_cmd, weight_graph);
  weight_cmd->add_option("--embeddings", weight_embeddings, "embeddings tsv")
      ->check(CLI::ExistingFile);
  weight_cmd->add_flag("--uniform", weight_uniform,
                       "unit weights instead of similarities");
  weight_cmd->add_option("--out", weight_out, "weighted edge tsv");

  // search
  GraphArgs search_graph;
  std::string search_embeddings;
  std::string search_keywords;
  std::string search_match = "token";
  std::string search_mode = "l2sp";
  std::string search_out = "answer.dot";
  std::string search_json;
  CLI::App* search_cmd =
      app.add_subcommand("search", "keyword search via a Steiner answer tree");
  add_graph_options(search_cmd, search_graph);
  search_cmd->add_option("--embeddings", search_embeddings, "embeddings tsv")
      ->check(CLI::ExistingFile);
  search_cmd->add_option("--keywords", search_keywords, "comma-separated list")
      ->required();
  search_cmd->add_option("--match", search_match, "token|substring")
      ->check(CLI::IsMember({"token", "substring"}));
  search_cmd->add_option("--mode", search_mode,
                         "l2sp (similarity weights) | uniform")
      ->check(CLI::IsMember({"l2sp", "uniform"}));
  search_cmd->add_option("--out", search_out, "answer tree dot file");
  search_cmd->add_option("--json", search_json, "optional answer json");

  // eval
  GraphArgs eval_graph;
  std::string eval_embeddings;
  std::string eval_labels;
  std::string eval_out = "metrics.json";
  std::uint64_t eval_seed = 0;
  EvalConfig eval_cfg;
  CLI::App* eval_cmd = app.add_subcommand(
      "eval", "downstream classification and edge validation");
  add_graph_options(eval_cmd, eval_graph);
  eval_cmd->add_option("--embeddings", eval_embeddings, "embeddings tsv")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--labels", eval_labels, "node labels tsv")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--seed", eval_seed, "evaluation seed");
  eval_cmd->add_option("--folds", eval_cfg.folds, "cross-validation folds");
  eval_cmd->add_option("--out", eval_out, "metrics json");

  // pipeline
  std::string pipeline_config;
  std::uint64_t pipeline_seed = 0;
  std::size_t pipeline_threads = 0;
  CLI::App* pipeline_cmd =
      app.add_subcommand("pipeline", "run every phase from a config file");
  pipeline_cmd->add_option("--config", pipeline_config, "json config")
      ->required()
      ->check(CLI::ExistingFile);
  CLI::Option* seed_opt =
      pipeline_cmd->add_option("--seed", pipeline_seed, "override config seed");
  CLI::Option* threads_opt = pipeline_cmd->add_option(
      "--threads", pipeline_threads, "override config threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad flags and missing inputs: config error
  }

  if (sample_cmd->parsed()) {
    sampler.mode = parse_mode_tag(sample_mode);
    TextAttributedGraph g = load(sample_graph);
    SampleDiagnostics diag;
    std::vector<ShortestPathSegment> segments =
        sample_segments(g, sampler, &diag);
    ensure_parent_dir(sample_out);
    write_paths_jsonl(sample_out, segments, sampler.mode);
    std::cout << "segments: " << segments.size()
              << " sources: " << diag.sources_sampled
              << " skipped: " << diag.sources_skipped << "\n";
    if (!diag.message.empty()) std::cerr << diag.message << "\n";
    return 0;
  }

  if (text_cmd->parsed()) {
    TextAttributedGraph g = load(text_graph);
    std::vector<ShortestPathSegment> segments = read_paths_jsonl(text_paths);
    TextualizerConfig cfg;
    cfg.max_phrases = text_max_phrases;
    if (!text_stopwords.empty()) cfg.stopwords = load_stopwords(text_stopwords);
    cfg.threads = text_threads;
    Corpus corpus = build_corpus(segments, g, cfg);
    ensure_parent_dir(text_out);
    write_corpus_jsonl(text_out, corpus.entries);
    std::cout << "texts: " << corpus.entries.size()
              << " nodes without phrases: " << corpus.empty_attribute_nodes
              << "\n";
    return 0;
  }

  if (train_cmd->parsed()) {
    std::vector<TextualizedPath> entries = read_corpus_jsonl(train_corpus);
    Vocab vocab = build_vocab(entries);
    model_cfg.vocab = static_cast<std::uint32_t>(vocab.size());
    std::vector<std::vector<TokenId>> sequences;
    sequences.reserve(entries.size());
    for (const TextualizedPath& entry : entries) {
      sequences.push_back(encode(vocab, entry.text, model_cfg.max_len));
    }
    double final_loss = 0.0;
    ensure_parent_dir(train_model_out);
    ensure_parent_dir(train_vocab_out);
    if (train_precision == "f64") {
      ToyModel<double> model(model_cfg);
      model.init_parameters(derive_seed(train_cfg.seed, "init"));
      TrainResult result = train(model, sequences, train_cfg);
      if (!result.loss_trace.empty()) final_loss = result.loss_trace.back();
      save_model(model, train_model_out);
    } else {
      ToyModel<float> model(model_cfg);
      model.init_parameters(derive_seed(train_cfg.seed, "init"));
      TrainResult result = train(model, sequences, train_cfg);
      if (!result.loss_trace.empty()) final_loss = result.loss_trace.back();
      save_model(model, train_model_out);
    }
    save_vocab(vocab, train_vocab_out);
    std::cout << "vocab: " << vocab.size() << " final loss: " << final_loss
              << "\n";
    return 0;
  }

  if (embed_cmd->parsed()) {
    TextAttributedGraph g = load(embed_graph);
    ToyModel<float> model = load_model(embed_model);
    Vocab vocab = load_vocab(embed_vocab);
    StopwordList stopwords = embed_stopwords.empty()
                                 ? default_stopwords()
                                 : load_stopwords(embed_stopwords);
    EmbeddingTable table;
    table.dim = model.cfg.d;
    table.vectors.resize(g.node_count());
    std::vector<unsigned char> short_text(g.node_count(), 0);
    parallel_for(g.node_count(), embed_threads, [&](std::size_t v) {
      KeyphraseSet set =
          extract_keyphrases(clean_text(g.nodes[v].raw_text),
                             embed_max_phrases, stopwords);
      std::string text;
      for (std::size_t i = 0; i < set.phrases.size(); ++i) {
        if (i > 0) text += ", ";
        text += set.phrases[i].first;
      }
      auto [vec, empty] = extract_node_embedding(model, text, vocab);
      table.vectors[v] = std::move(vec);
      short_text[v] = empty ? 1 : 0;
    });
    ensure_parent_dir(embed_out);
    export_embeddings(table, embed_out);
    if (!embed_bin_out.empty()) {
      ensure_parent_dir(embed_bin_out);
      export_embeddings_bin(table, embed_bin_out);
    }
    std::size_t empties = 0;
    for (unsigned char flag : short_text) empties += flag;
    std::cout << "embeddings: " << table.vectors.size()
              << " zero (no usable text): " << empties << "\n";
    return 0;
  }

  if (weight_cmd->parsed()) {
    TextAttributedGraph g = load(weight_graph);
    WeightedQueryGraph wg;
    if (weight_uniform) {
      wg = uniform_query_graph(g);
    } else {
      if (weight_embeddings.empty()) {
        throw ConfigError("weight: --embeddings is required unless --uniform");
      }
      wg = build_query_graph(g, import_embeddings(weight_embeddings));
    }
    ensure_parent_dir(weight_out);
    write_weighted_edges(wg, weight_out);
    std::cout << "edges kept: " << wg.edges.size() << " of " << g.edge_count()
              << "\n";
    return 0;
  }

  if (search_cmd->parsed()) {
    TextAttributedGraph g = load(search_graph);
    WeightedQueryGraph wg;
    if (search_mode == "uniform") {
      wg = uniform_query_graph(g);
    } else {
      if (search_embeddings.empty()) {
        throw ConfigError(
            "search: --embeddings is required for mode l2sp");
      }
      wg = build_query_graph(g, import_embeddings(search_embeddings));
    }
    QuerySpec query;
    query.keywords = split_keywords(search_keywords);
    query.match = search_match == "substring" ? KeywordMatch::SubstringCI
                                              : KeywordMatch::TokenExact;
    validate(query);
    std::vector<std::pair<std::string, NodeId>> terminals =
        map_keywords_to_terminals(g, query);
    std::vector<NodeId> nodes;
    for (const auto& [keyword, node] : terminals) nodes.push_back(node);
    SteinerAnswer answer = steiner_2approx(wg, nodes);
    answer.terminals = terminals;
    ensure_parent_dir(search_out);
    write_text_file(search_out, export_answer_dot(answer, g));
    if (!search_json.empty()) {
      ensure_parent_dir(search_json);
      write_text_file(search_json, export_answer_json(answer, g));
    }
    AnswerDistance dist = answer_distance(answer);
    std::cout << "answer nodes: "
              << (answer.edges.empty() ? answer.terminal_nodes.size()
                                       : answer.edges.size() + 1)
              << " cost: " << format_double(answer.cost)
              << " mean terminal distance: " << format_double(dist.mean)
              << "\n";
    return 0;
  }

  if (eval_cmd->parsed()) {
    TextAttributedGraph g = load(eval_graph);
    EmbeddingTable table = import_embeddings(eval_embeddings);
    MetricsReport classification;
    bool have_labels = !eval_labels.empty();
    if (have_labels) {
      std::vector<std::pair<NodeId, std::string>> labels =
          load_labels(eval_labels, g);
      classification = node_classification_eval(
          table, labels, derive_seed(eval_seed, "eval-cls"), eval_cfg);
    }
    MetricsReport edges = edge_validation_eval(
        table, g, derive_seed(eval_seed, "eval-edge"), eval_cfg);
    ensure_parent_dir(eval_out);
    write_metrics_json(eval_out, have_labels ? &classification : nullptr,
                       &edges, eval_seed, eval_cfg);
    if (have_labels) {
      std::cout << "classification macro-f1: " << classification.mean.macro_f1
                << " accuracy: " << classification.mean.accuracy << "\n";
    }
    std::cout << "edge validation auc: " << edges.mean.auc
              << " accuracy: " << edges.mean.accuracy << "\n";
    return 0;
  }

  if (pipeline_cmd->parsed()) {
    PipelineConfig cfg = load_pipeline_config(pipeline_config);
    if (seed_opt->count() > 0) cfg.seed = pipeline_seed;
    if (threads_opt->count() > 0) cfg.threads = pipeline_threads;
    PipelineResult result = run_pipeline(cfg);
    for (const PhaseStatus& phase : result.phases) {
      std::cout << phase.name << ": " << (phase.skipped ? "skipped" : "ran")
                << "\n";
    }
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const pathllm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const pathllm::InfeasibleQueryError& e) {
    std::cerr << "infeasible query: " << e.what() << "\n";
    return 3;
  } catch (const pathllm::PhaseError& e) {
    std::cerr << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
