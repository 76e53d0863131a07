#pragma once

namespace cylflow {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cylflow
