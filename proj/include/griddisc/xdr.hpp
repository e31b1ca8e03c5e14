#pragma once

#include "griddisc/errors.hpp"

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace griddisc {

// Minimal XDR (RFC 4506 conventions): big-endian, every item padded to a
// 4-byte boundary, strings length-prefixed with u32.

class XdrEncoder {
public:
    void put_u32(std::uint32_t v) {
        std::uint8_t w[4] = {static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16),
                             static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)};
        append(w, 4);
    }

    void put_u64(std::uint64_t v) {
        put_u32(static_cast<std::uint32_t>(v >> 32));
        put_u32(static_cast<std::uint32_t>(v));
    }

    void put_string(const std::string& s) {
        put_u32(static_cast<std::uint32_t>(s.size()));
        append(s.data(), s.size());
        pad();
    }

    // Fixed-length opaque data, no length prefix.
    void put_raw(const void* data, std::size_t len) {
        append(data, len);
        pad();
    }

    const std::vector<std::uint8_t>& bytes() const { return buf_; }
    std::vector<std::uint8_t> take() { return std::move(buf_); }
    std::size_t size() const { return buf_.size(); }

private:
    void append(const void* data, std::size_t len) {
        auto p = static_cast<const std::uint8_t*>(data);
        buf_.insert(buf_.end(), p, p + len);
    }

    void pad() {
        while (buf_.size() % 4 != 0) buf_.push_back(0);
    }

    std::vector<std::uint8_t> buf_;
};

class XdrDecoder {
public:
    XdrDecoder(const std::uint8_t* data, std::size_t len) : data_(data), len_(len) {}

    std::uint32_t get_u32() {
        need(4);
        std::uint32_t v = (std::uint32_t(data_[pos_]) << 24) | (std::uint32_t(data_[pos_ + 1]) << 16) |
                          (std::uint32_t(data_[pos_ + 2]) << 8) | std::uint32_t(data_[pos_ + 3]);
        pos_ += 4;
        return v;
    }

    std::uint64_t get_u64() {
        std::uint64_t hi = get_u32();
        return (hi << 32) | get_u32();
    }

    std::string get_string() {
        std::uint32_t n = get_u32();
        need(n);
        std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
        pos_ += n;
        skip_pad();
        return s;
    }

    void get_raw(void* out, std::size_t len) {
        need(len);
        std::memcpy(out, data_ + pos_, len);
        pos_ += len;
        skip_pad();
    }

    std::size_t remaining() const { return len_ - pos_; }
    std::size_t position() const { return pos_; }

    void expect_end() const {
        if (pos_ != len_) throw MalformedPayload("trailing bytes after payload");
    }

private:
    void need(std::size_t n) {
        if (len_ - pos_ < n) throw TruncatedPacket("need " + std::to_string(n) + " bytes, have " +
                                                   std::to_string(len_ - pos_));
    }

    // Padding bytes must be zero so every valid encoding is canonical.
    void skip_pad() {
        while (pos_ % 4 != 0) {
            need(1);
            if (data_[pos_] != 0) throw MalformedPayload("nonzero padding byte");
            ++pos_;
        }
    }

    const std::uint8_t* data_;
    std::size_t len_;
    std::size_t pos_ = 0;
};

} // namespace griddisc
