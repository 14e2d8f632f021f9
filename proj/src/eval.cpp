#include "pathllm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "pathllm/errors.hpp"
#include "pathllm/io_util.hpp"
#include "pathllm/nn.hpp"
#include "pathllm/rng.hpp"

namespace pathllm {

namespace {

FoldMetrics classification_metrics(const std::vector<std::size_t>& truth,
                                   const std::vector<std::size_t>& pred,
                                   std::size_t n_classes, bool* zero_flag) {
  std::vector<std::size_t> tp(n_classes, 0), fp(n_classes, 0),
      fn(n_classes, 0), support(n_classes, 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++support[truth[i]];
    if (pred[i] == truth[i]) {
      ++correct;
      ++tp[truth[i]];
    } else {
      ++fp[pred[i]];
      ++fn[truth[i]];
    }
  }
  FoldMetrics m;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  double macro = 0.0;
  std::size_t tp_sum = 0, fp_sum = 0, fn_sum = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (support[c] == 0 && zero_flag) *zero_flag = true;
    double prec = tp[c] + fp[c] ? static_cast<double>(tp[c]) / (tp[c] + fp[c]) : 0.0;
    double rec = tp[c] + fn[c] ? static_cast<double>(tp[c]) / (tp[c] + fn[c]) : 0.0;
    double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    macro += f1;
    tp_sum += tp[c];
    fp_sum += fp[c];
    fn_sum += fn[c];
  }
  m.macro_f1 = macro / static_cast<double>(n_classes);
  double micro_p = tp_sum + fp_sum ? static_cast<double>(tp_sum) / (tp_sum + fp_sum) : 0.0;
  double micro_r = tp_sum + fn_sum ? static_cast<double>(tp_sum) / (tp_sum + fn_sum) : 0.0;
  m.micro_f1 =
      micro_p + micro_r > 0 ? 2 * micro_p * micro_r / (micro_p + micro_r) : 0.0;
  return m;
}

FoldMetrics mean_metrics(const std::vector<FoldMetrics>& folds) {
  FoldMetrics mean;
  for (const FoldMetrics& f : folds) {
    mean.macro_f1 += f.macro_f1;
    mean.micro_f1 += f.micro_f1;
    mean.accuracy += f.accuracy;
    mean.auc += f.auc;
  }
  double n = static_cast<double>(folds.size());
  mean.macro_f1 /= n;
  mean.micro_f1 /= n;
  mean.accuracy /= n;
  mean.auc /= n;
  return mean;
}

}  // namespace

std::vector<std::vector<std::size_t>> stratified_folds(
    const std::vector<std::pair<NodeId, std::string>>& labels,
    std::size_t n_folds, std::uint64_t seed) {
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[labels[i].second].push_back(i);
  }
  std::vector<std::vector<std::size_t>> folds(n_folds);
  std::uint64_t class_idx = 0;
  for (auto& [label, members] : by_class) {
    Rng rng = Rng::substream(seed, class_idx++);
    rng.shuffle(members);
    for (std::size_t i = 0; i < members.size(); ++i) {
      folds[i % n_folds].push_back(members[i]);
    }
  }
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

MetricsReport node_classification_eval(
    const EmbeddingTable& table,
    const std::vector<std::pair<NodeId, std::string>>& labels,
    std::uint64_t seed, const EvalConfig& cfg) {
  if (labels.empty()) throw ConfigError("classification: no labels");
  std::set<std::string> class_names;
  for (const auto& [node, label] : labels) {
    if (node >= table.vectors.size()) {
      throw ConfigError("classification: labeled node lacks an embedding");
    }
    class_names.insert(label);
  }
  if (class_names.size() < 2) {
    throw ConfigError("classification: need at least 2 classes");
  }
  std::map<std::string, std::size_t> class_index;
  for (const std::string& name : class_names) {
    class_index.emplace(name, class_index.size());
  }
  const std::size_t C = class_index.size();
  const std::size_t d = table.dim;

  std::vector<std::vector<std::size_t>> folds =
      stratified_folds(labels, cfg.folds, derive_seed(seed, "folds"));

  MetricsReport report;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<std::size_t> train_idx;
    for (std::size_t other = 0; other < folds.size(); ++other) {
      if (other == f) continue;
      train_idx.insert(train_idx.end(), folds[other].begin(),
                       folds[other].end());
    }
    std::sort(train_idx.begin(), train_idx.end());

    std::vector<double> params(d * C + C, 0.0);
    Rng init_rng = Rng::substream(derive_seed(seed, "cls-init"), f);
    for (std::size_t i = 0; i < d * C; ++i) {
      params[i] = init_rng.normal() * 0.02;
    }
    nn::AdamState<double> adam(params.size());
    nn::AdamConfig adam_cfg;
    adam_cfg.lr = cfg.lr;

    std::vector<double> grad(params.size(), 0.0);
    Rng shuffle_rng = Rng::substream(derive_seed(seed, "cls-shuffle"), f);
    std::vector<std::size_t> order = train_idx;
    for (std::size_t epoch = 0; epoch < cfg.classification_epochs; ++epoch) {
      shuffle_rng.shuffle(order);
      for (std::size_t at = 0; at < order.size(); at += cfg.batch) {
        std::size_t stop = std::min(at + cfg.batch, order.size());
        std::size_t rows = stop - at;
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t r = at; r < stop; ++r) {
          const std::vector<float>& emb = table.vectors[labels[order[r]].first];
          std::vector<double> x(d);
          for (std::size_t i = 0; i < d; ++i) x[i] = emb[i];
          std::vector<double> logits(C);
          nn::dense_forward(x.data(), params.data(), &params[d * C], 1, d, C,
                            logits.data());
          double mx = *std::max_element(logits.begin(), logits.end());
          double sum = 0;
          for (double& z : logits) {
            z = std::exp(z - mx);
            sum += z;
          }
          std::vector<double> dlogits(C);
          std::size_t y = class_index.at(labels[order[r]].second);
          for (std::size_t c = 0; c < C; ++c) {
            dlogits[c] = (logits[c] / sum - (c == y ? 1.0 : 0.0)) /
                         static_cast<double>(rows);
          }
          nn::dense_backward(x.data(), params.data(), dlogits.data(), 1, d, C,
                             static_cast<double*>(nullptr), grad.data(),
                             &grad[d * C]);
        }
        adam.step(params, grad, 1.0, adam_cfg);
      }
    }

    std::vector<std::size_t> truth, pred;
    for (std::size_t idx : folds[f]) {
      const std::vector<float>& emb = table.vectors[labels[idx].first];
      std::vector<double> x(d);
      for (std::size_t i = 0; i < d; ++i) x[i] = emb[i];
      std::vector<double> logits(C);
      nn::dense_forward(x.data(), params.data(), &params[d * C], 1, d, C,
                        logits.data());
      std::size_t best = 0;
      for (std::size_t c = 1; c < C; ++c) {
        if (logits[c] > logits[best]) best = c;
      }
      truth.push_back(class_index.at(labels[idx].second));
      pred.push_back(best);
    }
    report.folds.push_back(
        classification_metrics(truth, pred, C, &report.zero_test_class));
  }
  report.mean = mean_metrics(report.folds);
  return report;
}

namespace {

// Two-layer validator: d -> hidden -> 1 logit, gelu between, trained with
// logistic loss on Hadamard pair features.
struct PairValidator {
  std::size_t d, hidden;
  std::vector<double> params;
  std::size_t w1 = 0, b1, w2, b2;

  PairValidator(std::size_t dim, std::uint64_t init_seed)
      : d(dim), hidden(std::max<std::size_t>(1, dim / 2)) {
    b1 = d * hidden;
    w2 = b1 + hidden;
    b2 = w2 + hidden;
    params.assign(b2 + 1, 0.0);
    Rng rng(init_seed);
    for (std::size_t i = 0; i < d * hidden; ++i) {
      params[i] = rng.normal() * 0.02;
    }
    for (std::size_t i = 0; i < hidden; ++i) {
      params[w2 + i] = rng.normal() * 0.02;
    }
  }

  double logit(const double* x, std::vector<double>& h,
               std::vector<double>& hact) const {
    h.assign(hidden, 0.0);
    nn::dense_forward(x, params.data(), &params[b1], 1, d, hidden, h.data());
    hact.resize(hidden);
    for (std::size_t i = 0; i < hidden; ++i) hact[i] = nn::gelu(h[i]);
    double z = 0.0;
    nn::dense_forward(hact.data(), &params[w2], &params[b2], 1, hidden, 1, &z);
    return z;
  }

  void backward(const double* x, const std::vector<double>& h,
                const std::vector<double>& hact, double dz,
                std::vector<double>& grad) const {
    std::vector<double> dhact(hidden, 0.0);
    nn::dense_backward(hact.data(), &params[w2], &dz, 1, hidden, 1,
                       dhact.data(), &grad[w2], &grad[b2]);
    std::vector<double> dh(hidden);
    for (std::size_t i = 0; i < hidden; ++i) {
      dh[i] = dhact[i] * nn::gelu_grad(h[i]);
    }
    nn::dense_backward(x, params.data(), dh.data(), 1, d, hidden,
                       static_cast<double*>(nullptr), grad.data(), &grad[b1]);
  }
};

}  // namespace

MetricsReport edge_validation_eval(const EmbeddingTable& table,
                                   const TextAttributedGraph& g,
                                   std::uint64_t seed, const EvalConfig& cfg) {
  if (g.edge_count() < 10) {
    throw ConfigError("edge validation: need at least 10 edges");
  }
  if (table.vectors.size() < g.node_count()) {
    throw ConfigError("edge validation: missing embeddings");
  }
  const std::size_t d = table.dim;
  const std::size_t m = g.edge_count();
  const std::size_t n = g.node_count();

  std::vector<std::pair<NodeId, NodeId>> positives;
  for (const EdgeRecord& e : g.edges) positives.emplace_back(e.src, e.dst);
  Rng split_rng(derive_seed(seed, "edge-split"));
  split_rng.shuffle(positives);
  const std::size_t test_count = std::max<std::size_t>(1, m / 5);

  std::vector<std::pair<NodeId, NodeId>> non_edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (!g.find_edge(u, v)) non_edges.emplace_back(u, v);
    }
  }
  if (non_edges.size() < m) {
    throw ConfigError("edge validation: not enough non-edges to sample");
  }
  Rng neg_rng(derive_seed(seed, "edge-negatives"));
  neg_rng.shuffle(non_edges);

  struct Sample {
    std::vector<double> x;
    int y;
  };
  auto hadamard = [&table, d](NodeId u, NodeId v) {
    std::vector<double> x(d);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = static_cast<double>(table.vectors[u][i]) *
             static_cast<double>(table.vectors[v][i]);
    }
    return x;
  };
  std::vector<Sample> train, test;
  for (std::size_t i = 0; i < positives.size(); ++i) {
    Sample s{hadamard(positives[i].first, positives[i].second), 1};
    (i < test_count ? test : train).push_back(std::move(s));
  }
  for (std::size_t i = 0; i < m; ++i) {
    Sample s{hadamard(non_edges[i].first, non_edges[i].second), 0};
    (i < test_count ? test : train).push_back(std::move(s));
  }

  PairValidator net(d, derive_seed(seed, "edge-init"));
  nn::AdamState<double> adam(net.params.size());
  nn::AdamConfig adam_cfg;
  adam_cfg.lr = cfg.lr;
  std::vector<double> grad(net.params.size(), 0.0);
  Rng shuffle_rng(derive_seed(seed, "edge-shuffle"));
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<double> h, hact;
  for (std::size_t epoch = 0; epoch < cfg.edge_epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (std::size_t at = 0; at < order.size(); at += cfg.batch) {
      std::size_t stop = std::min(at + cfg.batch, order.size());
      std::size_t rows = stop - at;
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t r = at; r < stop; ++r) {
        const Sample& s = train[order[r]];
        double z = net.logit(s.x.data(), h, hact);
        double dz = (1.0 / (1.0 + std::exp(-z)) - s.y) /
                    static_cast<double>(rows);
        net.backward(s.x.data(), h, hact, dz, grad);
      }
      adam.step(net.params, grad, 1.0, adam_cfg);
    }
  }

  std::vector<double> scores;
  std::vector<int> ys;
  std::vector<std::size_t> truth, pred;
  for (const Sample& s : test) {
    double z = net.logit(s.x.data(), h, hact);
    double score = 1.0 / (1.0 + std::exp(-z));
    scores.push_back(score);
    ys.push_back(s.y);
    truth.push_back(static_cast<std::size_t>(s.y));
    pred.push_back(score > 0.5 ? 1 : 0);
  }

  MetricsReport report;
  FoldMetrics fold = classification_metrics(truth, pred, 2, nullptr);
  fold.auc = auc_by_ranks(scores, ys);
  report.folds.push_back(fold);
  report.mean = fold;
  return report;
}

double auc_by_ranks(const std::vector<double>& scores,
                    const std::vector<int>& labels) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&scores](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  std::vector<double> rank(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = avg;
    i = j + 1;
  }
  double pos_ranks = 0.0;
  std::size_t P = 0, N = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (labels[k]) {
      pos_ranks += rank[k];
      ++P;
    } else {
      ++N;
    }
  }
  if (P == 0 || N == 0) {
    throw std::invalid_argument("auc needs both classes");
  }
  return (pos_ranks - static_cast<double>(P) * (P + 1) / 2.0) /
         (static_cast<double>(P) * static_cast<double>(N));
}

double auc_by_pairs(const std::vector<double>& scores,
                    const std::vector<int>& labels) {
  double wins = 0.0;
  std::size_t P = 0, N = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    ++P;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      if (scores[i] > scores[j]) {
        wins += 1.0;
      } else if (scores[i] == scores[j]) {
        wins += 0.5;
      }
    }
  }
  for (int y : labels) {
    if (!y) ++N;
  }
  if (P == 0 || N == 0) {
    throw std::invalid_argument("auc needs both classes");
  }
  return wins / (static_cast<double>(P) * static_cast<double>(N));
}

namespace {

nlohmann::json metrics_to_json(const MetricsReport& report) {
  auto fold_json = [](const FoldMetrics& f) {
    return nlohmann::json{{"macro_f1", f.macro_f1},
                          {"micro_f1", f.micro_f1},
                          {"accuracy", f.accuracy},
                          {"auc", f.auc}};
  };
  nlohmann::json arr = nlohmann::json::array();
  for (const FoldMetrics& f : report.folds) arr.push_back(fold_json(f));
  return nlohmann::json{{"folds", arr},
                        {"mean", fold_json(report.mean)},
                        {"zero_test_class", report.zero_test_class}};
}

}  // namespace

void write_metrics_json(const std::string& path,
                        const MetricsReport* classification,
                        const MetricsReport* edge_validation,
                        std::uint64_t seed, const EvalConfig& cfg) {
  nlohmann::json doc;
  doc["seed"] = seed;
  doc["config"] = {{"classification_epochs", cfg.classification_epochs},
                   {"edge_epochs", cfg.edge_epochs},
                   {"lr", cfg.lr},
                   {"batch", cfg.batch},
                   {"folds", cfg.folds}};
  if (classification) {
    doc["node_classification"] = metrics_to_json(*classification);
  }
  if (edge_validation) {
    doc["edge_validation"] = metrics_to_json(*edge_validation);
  }
  write_text_file(path, doc.dump(2) + "\n");
}

}  // namespace pathllm
