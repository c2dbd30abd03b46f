#pragma once

#include <optional>
#include <span>

namespace lscp {

// Pearson product-moment correlation, clamped to [-1, 1]. Empty when either
// input is constant. Throws on length mismatch or fewer than 2 elements.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

}  // namespace lscp
