#pragma once

#include <stdexcept>

namespace svylasso::app {

/// Bad command-line input, configuration or data file.
class UserError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUser = 2;
inline constexpr int kExitNumeric = 3;

}  // namespace svylasso::app
