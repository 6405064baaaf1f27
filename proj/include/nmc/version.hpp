#pragma once

namespace nmc {
inline constexpr const char* kVersion = "0.1.0";
}
