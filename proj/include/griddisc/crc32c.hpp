#pragma once

#include <cstddef>
#include <cstdint>

namespace griddisc {

// CRC-32C (Castagnoli), the variant used for storage-log entry checksums.
std::uint32_t crc32c(const void* data, std::size_t len, std::uint32_t seed = 0);

} // namespace griddisc
