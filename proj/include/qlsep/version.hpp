#pragma once

namespace qlsep {

inline constexpr const char *kVersion = "0.1.0";

} // namespace qlsep
