#pragma once

namespace fusion {
inline constexpr const char* kVersion = "1.0.0";
}
