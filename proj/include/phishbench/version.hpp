#pragma once

namespace phishbench {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace phishbench
