// SPDX-License-Identifier: Apache-2.0

#include "ranopt/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>
#include <sstream>

#include "ranopt/error.hpp"
#include "ranopt/ingest.hpp"

namespace ranopt {

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
    throw Error(ErrorCode::io_error, "sha-256 unavailable");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0x0f]);
  }
  return out;
}

std::string dataset_digest(const std::vector<MeasurementSample>& samples, const std::vector<SiteConfig>& sites) {
  std::ostringstream out;
  write_samples_csv(out, samples);
  out << '\n';
  write_sites_csv(out, sites);
  return sha256_hex(out.str());
}

}  // namespace ranopt
