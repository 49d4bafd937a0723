#pragma once

namespace isoci {

inline constexpr const char* version = "0.1.0";

} // namespace isoci
