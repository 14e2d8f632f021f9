#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathllm/errors.hpp"
#include "pathllm/model.hpp"
#include "pathllm/nn.hpp"
#include "pathllm/rng.hpp"

namespace pathllm {

struct TrainConfig {
  double lr = 2e-4;
  std::size_t batch = 8;
  std::size_t steps = 1000;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
};

inline void validate(const TrainConfig& cfg) {
  if (cfg.lr < 0) throw ConfigError("train: learning rate must be >= 0");
  if (cfg.batch < 1) throw ConfigError("train: batch size must be >= 1");
  if (cfg.steps < 1) throw ConfigError("train: steps must be >= 1");
}

struct TrainResult {
  std::vector<double> loss_trace;  // one mean-over-batch loss per step
};

// Adam mini-batch training. Each step draws the next cfg.batch sequences
// from a per-epoch seeded shuffle, averages per-text losses and gradients,
// and applies one bias-corrected update. Deterministic for a fixed seed;
// aborts when the loss stops being finite.
template <typename Scalar>
TrainResult train(ToyModel<Scalar>& model,
                  const std::vector<std::vector<TokenId>>& sequences,
                  const TrainConfig& cfg) {
  validate(cfg);
  if (sequences.empty()) throw ConfigError("train: empty corpus");
  for (const auto& seq : sequences) {
    if (seq.size() < 2) throw ConfigError("train: sequence shorter than 2");
  }

  const std::size_t P = model.param_count();
  std::vector<Scalar> grad(P, Scalar(0));
  nn::AdamState<Scalar> adam(P);
  nn::AdamConfig adam_cfg{cfg.lr, cfg.beta1, cfg.beta2, cfg.adam_eps};

  Rng shuffle_rng = Rng::substream(cfg.seed, 1);
  std::vector<std::size_t> order(sequences.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::size_t cursor = order.size();  // forces a shuffle on first use

  TrainResult result;
  result.loss_trace.reserve(cfg.steps);
  for (std::size_t step = 1; step <= cfg.steps; ++step) {
    std::fill(grad.begin(), grad.end(), Scalar(0));
    double batch_loss = 0.0;
    std::size_t batch_n = 0;
    for (; batch_n < cfg.batch; ++batch_n) {
      if (cursor >= order.size()) {
        shuffle_rng.shuffle(order);
        cursor = 0;
      }
      batch_loss +=
          static_cast<double>(model.loss_and_grad(sequences[order[cursor]], grad));
      ++cursor;
    }
    batch_loss /= static_cast<double>(batch_n);
    if (!std::isfinite(batch_loss)) {
      throw std::runtime_error("training diverged at step " +
                               std::to_string(step) + " (non-finite loss)");
    }
    result.loss_trace.push_back(batch_loss);

    adam.step(model.params, grad, 1.0 / static_cast<double>(batch_n),
              adam_cfg);
  }
  return result;
}

}  // namespace pathllm
