// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "json.hpp"

namespace ranopt {

using nlohmann::json;

inline json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace ranopt
