#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace prefcheck {

// Hex-encoded SHA-256 of `data`. Used for schema content hashes, weight
// fingerprints, and run manifests.
std::string sha256_hex(std::string_view data);

// FNV-1a 64-bit. Stable across platforms; used only to derive stage seeds,
// never for content identity.
std::uint64_t fnv1a64(std::string_view data);

// Deterministically derives an independent seed for a named stage from a
// run-level seed. Distinct stage names give unrelated streams.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage);

}  // namespace prefcheck
