#pragma once

#include "collatzlab/certifier.hpp"

#include <json.hpp>

#include <string>

namespace collatzlab {

nlohmann::json to_json(const BigInt& v);
nlohmann::json to_json(const AffineValue& v);
nlohmann::json to_json(const CertificateNode& node);
nlohmann::json to_json(const Certificate& cert);

/// Sorted keys, two-space indent, trailing newline. Stable byte-for-byte for
/// identical inputs and config.
std::string canonical_json(const Certificate& cert);

} // namespace collatzlab
