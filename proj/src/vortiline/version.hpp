#pragma once

namespace vortiline {
inline constexpr const char* kVersion = "0.1.0";
}
