#pragma once

namespace splinewalk {

inline constexpr const char* kVersion = "0.1.0";

}
