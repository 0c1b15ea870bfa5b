#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace gem {

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a(std::span<const unsigned char> bytes,
                    std::uint64_t seed = 0xcbf29ce484222325ull);
std::uint64_t fnv1a(std::string_view text);
std::uint64_t fnv1a_doubles(std::span<const double> values,
                            std::uint64_t seed = 0xcbf29ce484222325ull);

/// Fixed-width lowercase hex, 16 characters.
std::string to_hex(std::uint64_t value);

}  // namespace gem
