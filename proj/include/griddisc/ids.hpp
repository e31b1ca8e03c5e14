#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace griddisc {

// 128-bit opaque identifier used for both services and nodes.
// Canonical text form: lowercase hex with dashes, 8-4-4-4-12 (36 chars).
struct Id128 {
    std::array<std::uint8_t, 16> bytes{};

    auto operator<=>(const Id128&) const = default;

    bool is_nil() const {
        for (auto b : bytes)
            if (b != 0) return false;
        return true;
    }

    std::string str() const;

    // Strict parse of the canonical form; rejects uppercase, wrong
    // lengths and misplaced dashes.
    static std::optional<Id128> parse(std::string_view text);

    // Fresh identifier from the process entropy source.
    static Id128 random();
};

using IdGen = std::function<Id128()>;

struct Id128Hash {
    std::size_t operator()(const Id128& id) const {
        std::size_t h = 1469598103934665603ull;
        for (auto b : id.bytes) {
            h ^= b;
            h *= 1099511628211ull;
        }
        return h;
    }
};

} // namespace griddisc
