#pragma once

namespace finlm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace finlm
