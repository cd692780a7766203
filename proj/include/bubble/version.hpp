#pragma once

namespace bubble {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace bubble
