#pragma once

namespace embstab {

inline constexpr const char* kVersion = "0.1.0";

}
