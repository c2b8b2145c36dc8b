#ifndef FOU2_VERSION_HPP
#define FOU2_VERSION_HPP

namespace fou2 {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kEnsembleMagic = "FOU2ENS1";

}  // namespace fou2

#endif
