#ifndef CEE_VERSION_HPP
#define CEE_VERSION_HPP

namespace cee {

inline constexpr const char* version_string = "0.1.0";

} // namespace cee

#endif
