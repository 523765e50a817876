#pragma once

namespace mixent {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mixent
