#pragma once

namespace eprb {

inline constexpr const char* kVersion = "0.1.0";

} // namespace eprb
