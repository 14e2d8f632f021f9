#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pathllm/eval.hpp"
#include "pathllm/graph.hpp"
#include "pathllm/model.hpp"
#include "pathllm/sampling.hpp"
#include "pathllm/search.hpp"
#include "pathllm/train.hpp"

namespace pathllm {

struct PipelineConfig {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string out_dir;

  std::string nodes_path;
  std::string edges_path;
  GraphKind kind = GraphKind::Homogeneous;
  std::string labels_path;  // empty: no node classification

  SamplerConfig sampler;  // sampler.seed is derived from `seed` at run time
  std::size_t max_phrases = 5;
  std::string stopwords_path;  // empty: built-in list

  ModelConfig model;  // model.vocab filled from the corpus at train time
  std::string precision = "f32";
  TrainConfig train;  // train.seed derived at run time
  EvalConfig eval;

  QuerySpec query;  // empty keywords: no search phase
};

// Strict JSON config: unknown keys anywhere are a ConfigError, as are
// type mismatches. Every section except `graph` and `out_dir` is optional
// and falls back to the defaults above.
PipelineConfig load_pipeline_config(const std::string& path);

// Checks value ranges and that every referenced input path exists.
void validate(const PipelineConfig& cfg);

struct PhaseStatus {
  std::string name;
  bool skipped = false;  // inputs and outputs matched the manifest
};

struct PipelineResult {
  std::vector<PhaseStatus> phases;
};

// Runs sample -> textualize -> train -> embed -> weight [-> search] -> eval,
// writing paths.jsonl, corpus.jsonl, model.bin + vocab.tsv, embeddings.tsv,
// weighted_edges.tsv and metrics.json under out_dir. manifest.json maps each
// phase to content hashes of its inputs and outputs; a phase whose recorded
// hashes still match is skipped, so an interrupted run resumes where it
// stopped. Unexpected phase failures surface as PhaseError with the phase
// name; ConfigError and InfeasibleQueryError pass through unchanged.
PipelineResult run_pipeline(const PipelineConfig& cfg);

}  // namespace pathllm
