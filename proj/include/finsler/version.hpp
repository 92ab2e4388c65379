#pragma once

namespace finsler {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchemaVersion = "1";

}  // namespace finsler
