#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "polarwt/bitvec.hpp"
#include "polarwt/gf2.hpp"

namespace polarwt {

inline bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

inline unsigned log2_exact(std::size_t n) {
    if (!is_power_of_two(n)) throw std::invalid_argument("length must be a power of two");
    unsigned m = 0;
    while ((std::size_t{1} << m) < n) ++m;
    return m;
}

inline uint32_t reverse_bits(uint32_t x, unsigned m) {
    uint32_t r = 0;
    for (unsigned k = 0; k < m; ++k) {
        r = (r << 1) | (x & 1);
        x >>= 1;
    }
    return r;
}

// sigma(i) = index whose m-bit representation is i reversed (0-based)
inline std::vector<uint32_t> bit_reversal_permutation(unsigned m) {
    std::size_t n = std::size_t{1} << m;
    std::vector<uint32_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = reverse_bits(static_cast<uint32_t>(i), m);
    return perm;
}

// x = v * P_n * G^{(x) m} over GF(2), butterfly recursion, O(n log n).
// The input permutation P_n is applied first, matching the transform the
// bit-channel indexing is defined against.
inline void polar_transform_inplace(std::vector<uint8_t>& v) {
    std::size_t n = v.size();
    unsigned m = log2_exact(n);
    // apply bit-reversal: w[j] = v[rev(j)]
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t r = reverse_bits(static_cast<uint32_t>(j), m);
        if (r > j) std::swap(v[j], v[r]);
    }
    for (std::size_t h = 1; h < n; h <<= 1)
        for (std::size_t i = 0; i < n; i += 2 * h)
            for (std::size_t j = i; j < i + h; ++j) v[j] ^= v[j + h];
}

inline BitVector polar_encode(const BitVector& v) {
    BitVector x = v;
    polar_transform_inplace(x.raw());
    return x;
}

// Dense transform matrix, rows bit-reversed Kronecker power of [[1,0],[1,1]].
// Test oracle; guarded against large materialization.
inline GF2Matrix polar_transform_matrix(unsigned m) {
    if (m > 12) throw std::invalid_argument("polar_transform_matrix: m > 12 refused");
    std::size_t n = std::size_t{1} << m;
    // build G^{(x) m} by doubling
    GF2Matrix kron(1, 1);
    kron.set(0, 0, 1);
    for (unsigned s = 0; s < m; ++s) {
        std::size_t half = std::size_t{1} << s;
        GF2Matrix next(2 * half, 2 * half);
        for (std::size_t i = 0; i < half; ++i)
            for (std::size_t j = 0; j < half; ++j)
                if (kron.get(i, j)) {
                    next.set(i, j, 1);           // top-left block
                    next.set(i + half, j, 1);    // bottom-left block
                    next.set(i + half, j + half, 1);
                }
        kron = next;
    }
    GF2Matrix gn(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t src = reverse_bits(static_cast<uint32_t>(i), m);
        for (std::size_t w = 0; w < gn.words_per_row(); ++w) gn.row(i)[w] = kron.row(src)[w];
    }
    return gn;
}

}  // namespace polarwt
