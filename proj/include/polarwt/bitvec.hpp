#pragma once

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarwt/rng.hpp"

namespace polarwt {

// Fixed-length vector over GF(2). Storage is one byte per bit; the contract
// is purely element-wise.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t n, uint8_t fill = 0) : bits_(n, fill) {
        if (fill > 1) throw std::invalid_argument("BitVector: fill must be 0 or 1");
    }
    BitVector(std::initializer_list<int> init) {
        bits_.reserve(init.size());
        for (int b : init) {
            if (b != 0 && b != 1) throw std::invalid_argument("BitVector: elements must be 0 or 1");
            bits_.push_back(static_cast<uint8_t>(b));
        }
    }
    static BitVector from_bits(std::vector<uint8_t> bits) {
        for (uint8_t b : bits)
            if (b > 1) throw std::invalid_argument("BitVector: elements must be 0 or 1");
        BitVector v;
        v.bits_ = std::move(bits);
        return v;
    }
    static BitVector random(std::size_t n, Rng& rng) {
        BitVector v(n);
        for (std::size_t i = 0; i < n; ++i) v.bits_[i] = rng.next_bit();
        return v;
    }

    std::size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }
    uint8_t operator[](std::size_t i) const { return bits_[i]; }
    void set(std::size_t i, uint8_t b) {
        if (b > 1) throw std::invalid_argument("BitVector: elements must be 0 or 1");
        bits_[i] = b;
    }
    const std::vector<uint8_t>& raw() const { return bits_; }
    std::vector<uint8_t>& raw() { return bits_; }

    BitVector operator^(const BitVector& o) const {
        if (size() != o.size()) throw std::invalid_argument("BitVector: xor length mismatch");
        BitVector r(size());
        for (std::size_t i = 0; i < size(); ++i) r.bits_[i] = bits_[i] ^ o.bits_[i];
        return r;
    }
    bool operator==(const BitVector& o) const { return bits_ == o.bits_; }
    bool operator!=(const BitVector& o) const { return bits_ != o.bits_; }

    bool all_zero() const {
        for (uint8_t b : bits_)
            if (b) return false;
        return true;
    }

    // Accepts "0101..." or "0x1f..". Hex expands to 4 bits per digit; when
    // expected_len is given the last expected_len bits are kept (leading pad
    // of a hex literal is dropped).
    static BitVector parse(const std::string& s, std::size_t expected_len = 0) {
        std::vector<uint8_t> bits;
        if (s.rfind("0x", 0) == 0 || s.rfind("0X", 0) == 0) {
            for (std::size_t i = 2; i < s.size(); ++i) {
                int d = hex_digit(s[i]);
                if (d < 0) throw std::invalid_argument("BitVector: bad hex digit in \"" + s + "\"");
                for (int k = 3; k >= 0; --k) bits.push_back(static_cast<uint8_t>((d >> k) & 1));
            }
            if (expected_len > 0) {
                if (bits.size() < expected_len)
                    throw std::invalid_argument("BitVector: hex string too short");
                bits.erase(bits.begin(), bits.end() - static_cast<long>(expected_len));
            }
        } else {
            for (char c : s) {
                if (c == '0') bits.push_back(0);
                else if (c == '1') bits.push_back(1);
                else throw std::invalid_argument("BitVector: bad binary digit in \"" + s + "\"");
            }
        }
        if (expected_len > 0 && bits.size() != expected_len)
            throw std::invalid_argument("BitVector: expected " + std::to_string(expected_len) +
                                        " bits, got " + std::to_string(bits.size()));
        return from_bits(std::move(bits));
    }

    std::string to_binary_string() const {
        std::string s;
        s.reserve(size());
        for (uint8_t b : bits_) s.push_back(b ? '1' : '0');
        return s;
    }

    std::string to_hex_string() const {
        std::string s = "0x";
        std::size_t pad = (4 - size() % 4) % 4;
        int acc = 0, cnt = 0;
        auto flush = [&]() {
            s.push_back("0123456789abcdef"[acc]);
            acc = 0;
            cnt = 0;
        };
        for (std::size_t i = 0; i < pad; ++i) ++cnt;  // implicit leading zeros
        for (uint8_t b : bits_) {
            acc = (acc << 1) | b;
            if (++cnt == 4) flush();
        }
        return s;
    }

private:
    static int hex_digit(char c) {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    }

    std::vector<uint8_t> bits_;
};

}  // namespace polarwt
