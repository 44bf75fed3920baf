#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace wltls {

enum class LossKind : uint8_t {
  exponential = 0,
  squared = 1,
  logistic = 2,
  hinge = 3,
  squared_hinge = 4,
  hamming_step = 5,
};

inline constexpr LossKind kAllLossKinds[] = {
    LossKind::exponential, LossKind::squared,       LossKind::logistic,
    LossKind::hinge,       LossKind::squared_hinge, LossKind::hamming_step,
};

// Margin-based binary loss L(z). Throws wltls::error on a non-finite margin.
double loss(LossKind kind, double z);

double loss_at_zero(LossKind kind);

// Name used on the command line and in reports.
const char* loss_name(LossKind kind);
std::optional<LossKind> parse_loss(std::string_view name);

}  // namespace wltls
