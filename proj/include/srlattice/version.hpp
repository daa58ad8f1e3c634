#pragma once

namespace srl {

inline constexpr const char* kVersion = "srlattice 0.1.0";

} // namespace srl
