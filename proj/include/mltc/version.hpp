#pragma once

namespace mltc {

inline constexpr const char* kToolkitVersion = "1.0.0";
inline constexpr int kModelFormatVersion = 1;
inline constexpr int kManifestFormatVersion = 1;
inline constexpr int kPlanFormatVersion = 1;

}  // namespace mltc
