#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "polarwt/bitvec.hpp"

namespace polarwt {

// Dense GF(2) matrix, rows packed into 64-bit words.
class GF2Matrix {
public:
    GF2Matrix() = default;
    GF2Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), wpr_((cols + 63) / 64), words_(rows * wpr_, 0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t words_per_row() const { return wpr_; }

    uint8_t get(std::size_t r, std::size_t c) const {
        return static_cast<uint8_t>((words_[r * wpr_ + c / 64] >> (c % 64)) & 1);
    }
    void set(std::size_t r, std::size_t c, uint8_t b) {
        uint64_t& w = words_[r * wpr_ + c / 64];
        uint64_t mask = 1ULL << (c % 64);
        w = b ? (w | mask) : (w & ~mask);
    }
    const uint64_t* row(std::size_t r) const { return words_.data() + r * wpr_; }
    uint64_t* row(std::size_t r) { return words_.data() + r * wpr_; }

    void xor_row_into(std::size_t src, std::size_t dst) {
        for (std::size_t w = 0; w < wpr_; ++w) words_[dst * wpr_ + w] ^= words_[src * wpr_ + w];
    }

    static GF2Matrix identity(std::size_t n) {
        GF2Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
        return m;
    }

    // row-vector times matrix: xors together rows selected by v
    BitVector multiply_left(const BitVector& v) const {
        if (v.size() != rows_) throw std::invalid_argument("GF2Matrix: dimension mismatch");
        std::vector<uint64_t> acc(wpr_, 0);
        for (std::size_t i = 0; i < rows_; ++i)
            if (v[i])
                for (std::size_t w = 0; w < wpr_; ++w) acc[w] ^= words_[i * wpr_ + w];
        BitVector out(cols_);
        for (std::size_t c = 0; c < cols_; ++c)
            out.set(c, static_cast<uint8_t>((acc[c / 64] >> (c % 64)) & 1));
        return out;
    }

    bool operator==(const GF2Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && words_ == o.words_;
    }

private:
    std::size_t rows_ = 0, cols_ = 0, wpr_ = 0;
    std::vector<uint64_t> words_;
};

// Incremental row-echelon basis over GF(2). insert() reduces the candidate
// against the basis and reports whether it was independent.
class GF2Echelon {
public:
    explicit GF2Echelon(std::size_t cols)
        : cols_(cols), wpr_((cols + 63) / 64), pivot_row_(cols, SIZE_MAX) {}

    std::size_t rank() const { return rank_; }

    bool insert(const uint64_t* row_words) {
        scratch_.assign(row_words, row_words + wpr_);
        while (true) {
            std::size_t p = highest_bit(scratch_.data());
            if (p == SIZE_MAX) return false;  // reduced to zero
            std::size_t br = pivot_row_[p];
            if (br == SIZE_MAX) {
                pivot_row_[p] = basis_.size() / wpr_;
                basis_.insert(basis_.end(), scratch_.begin(), scratch_.end());
                ++rank_;
                return true;
            }
            const uint64_t* b = basis_.data() + br * wpr_;
            for (std::size_t w = 0; w < wpr_; ++w) scratch_[w] ^= b[w];
        }
    }

    void reset() {
        basis_.clear();
        pivot_row_.assign(cols_, SIZE_MAX);
        rank_ = 0;
    }

private:
    std::size_t highest_bit(const uint64_t* row) const {
        for (std::size_t w = wpr_; w-- > 0;) {
            if (row[w]) {
                return w * 64 + 63 - static_cast<std::size_t>(__builtin_clzll(row[w]));
            }
        }
        return SIZE_MAX;
    }

    std::size_t cols_, wpr_;
    std::vector<uint64_t> basis_;
    std::vector<std::size_t> pivot_row_;
    std::vector<uint64_t> scratch_;
    std::size_t rank_ = 0;
};

}  // namespace polarwt
