#include "griddisc/ids.hpp"

#include <random>

namespace griddisc {

namespace {

constexpr char kHex[] = "0123456789abcdef";

// Dash positions in the canonical 36-char form.
constexpr bool is_dash_pos(std::size_t i) {
    return i == 8 || i == 13 || i == 18 || i == 23;
}

int hex_val(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

} // namespace

std::string Id128::str() const {
    std::string out;
    out.reserve(36);
    std::size_t byte = 0;
    for (std::size_t i = 0; i < 36; ++i) {
        if (is_dash_pos(i)) {
            out.push_back('-');
            continue;
        }
        std::uint8_t b = bytes[byte / 2];
        out.push_back(byte % 2 == 0 ? kHex[b >> 4] : kHex[b & 0x0f]);
        ++byte;
    }
    return out;
}

std::optional<Id128> Id128::parse(std::string_view text) {
    if (text.size() != 36) return std::nullopt;
    Id128 id;
    std::size_t nibble = 0;
    for (std::size_t i = 0; i < 36; ++i) {
        char c = text[i];
        if (is_dash_pos(i)) {
            if (c != '-') return std::nullopt;
            continue;
        }
        int v = hex_val(c);
        if (v < 0) return std::nullopt;
        if (nibble % 2 == 0)
            id.bytes[nibble / 2] = static_cast<std::uint8_t>(v << 4);
        else
            id.bytes[nibble / 2] |= static_cast<std::uint8_t>(v);
        ++nibble;
    }
    return id;
}

Id128 Id128::random() {
    thread_local std::mt19937_64 rng = [] {
        std::random_device rd;
        std::seed_seq seq{rd(), rd(), rd(), rd()};
        return std::mt19937_64(seq);
    }();
    Id128 id;
    for (std::size_t i = 0; i < 16; i += 8) {
        std::uint64_t w = rng();
        for (std::size_t j = 0; j < 8; ++j)
            id.bytes[i + j] = static_cast<std::uint8_t>(w >> (8 * j));
    }
    return id;
}

} // namespace griddisc
