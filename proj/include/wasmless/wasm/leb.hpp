#pragma once

#include <cstddef>
#include <cstdint>
#include <cstring>

#include "wasmless/bytes.hpp"
#include "wasmless/wasm/error.hpp"

namespace wasmless::wasm {

/// Bounds-checked cursor over a byte range. All reads throw MalformedModule
/// on truncation, so callers never have to re-check lengths.
class ByteReader {
  public:
    ByteReader(ByteView data) : begin_(data.data()), pos_(data.data()), end_(data.data() + data.size()) {}
    ByteReader(const uint8_t* begin, const uint8_t* end) : begin_(begin), pos_(begin), end_(end) {}

    size_t offset() const { return static_cast<size_t>(pos_ - begin_); }
    size_t remaining() const { return static_cast<size_t>(end_ - pos_); }
    bool done() const { return pos_ == end_; }
    const uint8_t* pos() const { return pos_; }

    uint8_t byte() {
        if (pos_ >= end_) throw MalformedModule("unexpected end of module");
        return *pos_++;
    }

    uint8_t peek() const {
        if (pos_ >= end_) throw MalformedModule("unexpected end of module");
        return *pos_;
    }

    ByteView bytes(size_t n) {
        if (remaining() < n) throw MalformedModule("unexpected end of module");
        ByteView out(pos_, n);
        pos_ += n;
        return out;
    }

    void skip(size_t n) {
        if (remaining() < n) throw MalformedModule("unexpected end of module");
        pos_ += n;
    }

    /// Unsigned LEB128, at most ceil(bits/7) bytes; non-minimal encodings are
    /// accepted but unused high bits must be zero.
    template <unsigned Bits = 32>
    uint64_t leb_u() {
        static_assert(Bits == 1 || Bits == 7 || Bits == 32 || Bits == 64);
        constexpr unsigned max_bytes = (Bits + 6) / 7;
        uint64_t value = 0;
        unsigned shift = 0;
        for (unsigned i = 0; i < max_bytes; ++i) {
            uint8_t b = byte();
            if (i + 1 == max_bytes) {
                unsigned used = Bits - shift;
                if ((b & 0x7f) >> used) throw MalformedModule("integer too large");
            }
            value |= static_cast<uint64_t>(b & 0x7f) << shift;
            shift += 7;
            if (!(b & 0x80)) return value;
        }
        throw MalformedModule("integer representation too long");
    }

    uint32_t leb_u32() { return static_cast<uint32_t>(leb_u<32>()); }
    uint64_t leb_u64() { return leb_u<64>(); }

    /// Signed LEB128 with the same length bound; the final byte's padding
    /// bits must be a sign extension.
    template <unsigned Bits>
    int64_t leb_s() {
        constexpr unsigned max_bytes = (Bits + 6) / 7;
        int64_t value = 0;
        unsigned shift = 0;
        for (unsigned i = 0; i < max_bytes; ++i) {
            uint8_t b = byte();
            if (i + 1 == max_bytes) {
                unsigned used = Bits - shift;  // meaningful bits in this byte
                uint8_t rest = static_cast<uint8_t>((b & 0x7f) >> (used - 1));
                uint8_t ext = static_cast<uint8_t>(0x7f >> (used - 1));
                if (rest != 0 && rest != ext) throw MalformedModule("integer too large");
            }
            value |= static_cast<int64_t>(static_cast<uint64_t>(b & 0x7f) << shift);
            shift += 7;
            if (!(b & 0x80)) {
                if (shift < 64 && (b & 0x40)) value |= -(int64_t(1) << shift);
                return value;
            }
        }
        throw MalformedModule("integer representation too long");
    }

    int32_t leb_s32() { return static_cast<int32_t>(leb_s<32>()); }
    int64_t leb_s64() { return leb_s<64>(); }

    float f32() {
        ByteView b = bytes(4);
        float v;
        std::memcpy(&v, b.data(), 4);
        return v;
    }

    double f64() {
        ByteView b = bytes(8);
        double v;
        std::memcpy(&v, b.data(), 8);
        return v;
    }

  private:
    const uint8_t* begin_;
    const uint8_t* pos_;
    const uint8_t* end_;
};

/// Append-only little emitter for the sections the instrumenter rebuilds.
class ByteWriter {
  public:
    Bytes take() { return std::move(out_); }
    const Bytes& data() const { return out_; }
    size_t size() const { return out_.size(); }

    void byte(uint8_t b) { out_.push_back(b); }
    void raw(ByteView b) { out_.insert(out_.end(), b.begin(), b.end()); }
    void raw(const Bytes& b) { out_.insert(out_.end(), b.begin(), b.end()); }

    void leb_u(uint64_t v) {
        do {
            uint8_t b = v & 0x7f;
            v >>= 7;
            if (v) b |= 0x80;
            out_.push_back(b);
        } while (v);
    }

    void leb_s(int64_t v) {
        bool more = true;
        while (more) {
            uint8_t b = v & 0x7f;
            v >>= 7;
            if ((v == 0 && !(b & 0x40)) || (v == -1 && (b & 0x40))) more = false;
            else b |= 0x80;
            out_.push_back(b);
        }
    }

    void name(std::string_view s) {
        leb_u(s.size());
        out_.insert(out_.end(), s.begin(), s.end());
    }

  private:
    Bytes out_;
};

}  // namespace wasmless::wasm
