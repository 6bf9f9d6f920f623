#pragma once

namespace aqua {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace aqua
