#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace bootsim::strategies {

// The four distribution strategies, in presentation order.
enum class StrategyKind { Fsd, Dbsr, Dbsa, Ddrs };

inline constexpr std::array<StrategyKind, 4> kAllStrategies = {
    StrategyKind::Fsd, StrategyKind::Dbsr, StrategyKind::Dbsa, StrategyKind::Ddrs};

constexpr std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Fsd:
      return "fsd";
    case StrategyKind::Dbsr:
      return "dbsr";
    case StrategyKind::Dbsa:
      return "dbsa";
    case StrategyKind::Ddrs:
      return "ddrs";
  }
  return "unknown";
}

constexpr std::optional<StrategyKind> parse_strategy(std::string_view name) {
  for (const StrategyKind kind : kAllStrategies) {
    if (name == to_string(kind)) {
      return kind;
    }
  }
  return std::nullopt;
}

}  // namespace bootsim::strategies
