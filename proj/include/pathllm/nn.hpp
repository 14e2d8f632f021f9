#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace pathllm::nn {

template <typename Scalar>
Scalar gelu(Scalar x) {
  const Scalar c1 = Scalar(0.7978845608028654);  // sqrt(2/pi)
  const Scalar c2 = Scalar(0.044715);
  return Scalar(0.5) * x * (Scalar(1) + std::tanh(c1 * (x + c2 * x * x * x)));
}

template <typename Scalar>
Scalar gelu_grad(Scalar x) {
  const Scalar c1 = Scalar(0.7978845608028654);
  const Scalar c2 = Scalar(0.044715);
  Scalar u = c1 * (x + c2 * x * x * x);
  Scalar th = std::tanh(u);
  Scalar du = c1 * (Scalar(1) + Scalar(3) * c2 * x * x);
  return Scalar(0.5) * (Scalar(1) + th) +
         Scalar(0.5) * x * (Scalar(1) - th * th) * du;
}

// y = x W (+ b) over T rows; W is row-major [in][out]; b may be null.
template <typename Scalar>
void dense_forward(const Scalar* x, const Scalar* w, const Scalar* b,
                   std::size_t T, std::size_t in, std::size_t out, Scalar* y) {
  for (std::size_t t = 0; t < T; ++t) {
    Scalar* yrow = y + t * out;
    for (std::size_t o = 0; o < out; ++o) yrow[o] = b ? b[o] : Scalar(0);
    const Scalar* xrow = x + t * in;
    for (std::size_t i = 0; i < in; ++i) {
      Scalar xi = xrow[i];
      const Scalar* wrow = w + i * out;
      for (std::size_t o = 0; o < out; ++o) yrow[o] += xi * wrow[o];
    }
  }
}

// Accumulates into dx, dw and db (dx and db may be null).
template <typename Scalar>
void dense_backward(const Scalar* x, const Scalar* w, const Scalar* dy,
                    std::size_t T, std::size_t in, std::size_t out, Scalar* dx,
                    Scalar* dw, Scalar* db) {
  for (std::size_t t = 0; t < T; ++t) {
    const Scalar* dyrow = dy + t * out;
    const Scalar* xrow = x + t * in;
    if (db) {
      for (std::size_t o = 0; o < out; ++o) db[o] += dyrow[o];
    }
    for (std::size_t i = 0; i < in; ++i) {
      const Scalar* wrow = w + i * out;
      Scalar* gw = dw + i * out;
      Scalar acc = 0;
      for (std::size_t o = 0; o < out; ++o) {
        acc += dyrow[o] * wrow[o];
        gw[o] += xrow[i] * dyrow[o];
      }
      if (dx) dx[t * in + i] += acc;
    }
  }
}

struct AdamConfig {
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected adaptive-moment update; moments kept in 64-bit regardless
// of the parameter precision.
template <typename Scalar>
struct AdamState {
  std::vector<double> m, v;
  std::size_t t = 0;

  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

  // Applies one update from grad * scale.
  void step(std::vector<Scalar>& params, const std::vector<Scalar>& grad,
            double scale, const AdamConfig& cfg) {
    ++t;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < params.size(); ++i) {
      double g = static_cast<double>(grad[i]) * scale;
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
      double update = cfg.lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg.eps);
      params[i] =
          static_cast<Scalar>(static_cast<double>(params[i]) - update);
    }
  }
};

}  // namespace pathllm::nn
