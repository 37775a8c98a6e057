// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ranopt {

enum class ErrorCode {
  insufficient_data,
  out_of_support,
  no_geo_data,
  invalid_argument,
  not_found,
  io_error,
  validation,
  conflict,
  scenario_mismatch,
};

std::string_view to_string(ErrorCode code);

/// Engine failure carrying a machine-readable code next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ranopt
