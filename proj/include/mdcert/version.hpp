#pragma once

namespace mdcert {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mdcert
