#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wasmless {

using Bytes = std::vector<uint8_t>;
using ByteView = std::span<const uint8_t>;

inline std::string to_hex(ByteView data) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (uint8_t b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

inline std::string to_string(ByteView data) {
    return std::string(data.begin(), data.end());
}

}  // namespace wasmless
