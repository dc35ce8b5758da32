#pragma once

namespace entrofunc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace entrofunc
