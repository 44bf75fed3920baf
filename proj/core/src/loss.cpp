#include "wltls/loss.hpp"

#include <cmath>
#include <string>

#include "wltls/common.hpp"

namespace wltls {

double loss(LossKind kind, double z) {
  if (!std::isfinite(z)) {
    throw error("loss: margin is not finite");
  }
  switch (kind) {
    case LossKind::exponential:
      return std::exp(-z);
    case LossKind::squared: {
      const double t = 1.0 - z;
      return t * t;
    }
    case LossKind::logistic:
      // log(1 + e^-z), evaluated so that large |z| neither overflows nor
      // collapses to 0 prematurely.
      return z > 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
    case LossKind::hinge:
      return z < 1.0 ? 1.0 - z : 0.0;
    case LossKind::squared_hinge: {
      if (z >= 1.0) return 0.0;
      const double t = 1.0 - z;
      return t * t;
    }
    case LossKind::hamming_step:
      if (z > 0.0) return 0.0;
      if (z < 0.0) return 1.0;
      return 0.5;
  }
  throw error("loss: unknown loss kind");
}

double loss_at_zero(LossKind kind) {
  switch (kind) {
    case LossKind::exponential:
    case LossKind::squared:
    case LossKind::hinge:
    case LossKind::squared_hinge:
      return 1.0;
    case LossKind::logistic:
      return std::log(2.0);
    case LossKind::hamming_step:
      return 0.5;
  }
  throw error("loss_at_zero: unknown loss kind");
}

const char* loss_name(LossKind kind) {
  switch (kind) {
    case LossKind::exponential:
      return "exp";
    case LossKind::squared:
      return "squared";
    case LossKind::logistic:
      return "log";
    case LossKind::hinge:
      return "hinge";
    case LossKind::squared_hinge:
      return "squaredhinge";
    case LossKind::hamming_step:
      return "hamming";
  }
  return "unknown";
}

std::optional<LossKind> parse_loss(std::string_view name) {
  for (LossKind kind : kAllLossKinds) {
    if (name == loss_name(kind)) return kind;
  }
  return std::nullopt;
}

}  // namespace wltls
