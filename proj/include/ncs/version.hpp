#pragma once

namespace ncs {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ncs
