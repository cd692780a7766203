#pragma once

#include <string_view>

namespace bubble {

/// Deterministic terms included in a unit-root test regression.
enum class DeterministicSpec { none, constant, constant_trend };

std::string_view to_string(DeterministicSpec spec);

}  // namespace bubble
