#pragma once

namespace mortkit {

inline constexpr const char* kVersion = "0.1.0";

} // namespace mortkit
