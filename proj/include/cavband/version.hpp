#pragma once

namespace cavband {
inline constexpr const char* kVersion = "0.1.0";
}
