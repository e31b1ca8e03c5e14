#include "griddisc/crc32c.hpp"

#include <array>

namespace griddisc {

namespace {

// Reflected polynomial 0x82F63B78.
std::array<std::uint32_t, 256> make_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t crc = i;
        for (int k = 0; k < 8; ++k)
            crc = (crc >> 1) ^ ((crc & 1) ? 0x82F63B78u : 0);
        table[i] = crc;
    }
    return table;
}

const std::array<std::uint32_t, 256> kTable = make_table();

} // namespace

std::uint32_t crc32c(const void* data, std::size_t len, std::uint32_t seed) {
    auto p = static_cast<const std::uint8_t*>(data);
    std::uint32_t crc = ~seed;
    for (std::size_t i = 0; i < len; ++i)
        crc = (crc >> 8) ^ kTable[(crc ^ p[i]) & 0xff];
    return ~crc;
}

} // namespace griddisc
