#ifndef GVX_VERSION_HPP
#define GVX_VERSION_HPP

namespace gvx {
inline constexpr const char* kVersion = "0.1.0";
}

#endif
