#pragma once

namespace tvrls {

inline constexpr const char* version = "0.1.0";

}  // namespace tvrls
