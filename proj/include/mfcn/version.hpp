#pragma once

namespace mfcn {
inline constexpr const char* kVersion = "0.1.0";
}
