#pragma once

namespace stinsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace stinsim
