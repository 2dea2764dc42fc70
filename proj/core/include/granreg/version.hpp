#pragma once

namespace granreg {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace granreg
