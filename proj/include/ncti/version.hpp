#pragma once

namespace ncti {
inline constexpr const char* kVersion = "0.1.0";
}
