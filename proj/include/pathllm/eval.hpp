#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pathllm/embedding.hpp"
#include "pathllm/graph.hpp"

namespace pathllm {

struct EvalConfig {
  std::size_t classification_epochs = 50;
  std::size_t edge_epochs = 100;
  double lr = 2e-4;
  std::size_t batch = 32;
  std::size_t folds = 5;
};

struct FoldMetrics {
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  double accuracy = 0.0;
  double auc = 0.0;
};

struct MetricsReport {
  std::vector<FoldMetrics> folds;
  FoldMetrics mean;
  bool zero_test_class = false;  // some class had no test instance
};

// Per-fold test index lists over `labels`; stratified by label, seeded
// shuffle within each class, folds partition the labeled set.
std::vector<std::vector<std::size_t>> stratified_folds(
    const std::vector<std::pair<NodeId, std::string>>& labels,
    std::size_t n_folds, std::uint64_t seed);

// One-layer softmax classifier on the embeddings, stratified 8:2 five-fold
// cross-validation, Macro/Micro-F1 and accuracy per fold.
MetricsReport node_classification_eval(
    const EmbeddingTable& table,
    const std::vector<std::pair<NodeId, std::string>>& labels,
    std::uint64_t seed, const EvalConfig& cfg = {});

// Held-out 20% of edges vs an equal count of sampled non-edges, Hadamard
// pair features, two-layer logistic validator, AUC and 0.5-threshold
// accuracy.
MetricsReport edge_validation_eval(const EmbeddingTable& table,
                                   const TextAttributedGraph& g,
                                   std::uint64_t seed,
                                   const EvalConfig& cfg = {});

// Mann-Whitney AUC with average ranks for ties.
double auc_by_ranks(const std::vector<double>& scores,
                    const std::vector<int>& labels);
// Probability-of-correct-ordering estimator over all pos/neg pairs.
double auc_by_pairs(const std::vector<double>& scores,
                    const std::vector<int>& labels);

// metrics.json with per-fold and mean metrics plus the config echo. Either
// report pointer may be null (section omitted).
void write_metrics_json(const std::string& path,
                        const MetricsReport* classification,
                        const MetricsReport* edge_validation,
                        std::uint64_t seed, const EvalConfig& cfg);

}  // namespace pathllm
