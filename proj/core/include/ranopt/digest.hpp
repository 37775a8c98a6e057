// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ranopt/types.hpp"

namespace ranopt {

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);

/// Digest of the canonical CSV serialization of a dataset; independent of the
/// number formatting of the files it was read from.
std::string dataset_digest(const std::vector<MeasurementSample>& samples,
                           const std::vector<SiteConfig>& sites);

}  // namespace ranopt
