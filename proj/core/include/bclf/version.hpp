#ifndef BCLF_VERSION_HPP
#define BCLF_VERSION_HPP

#define BCLF_VERSION_STRING "0.1.0"

namespace bclf {
inline const char* version() { return BCLF_VERSION_STRING; }
}  // namespace bclf

#endif  // BCLF_VERSION_HPP
