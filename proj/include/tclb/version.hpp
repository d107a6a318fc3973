#pragma once

namespace tclb {
inline constexpr const char* kToolchainVersion = "tclb 0.1.0";
}
