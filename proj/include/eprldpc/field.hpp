#pragma once

#include <cstdint>
#include <vector>

#include "eprldpc/bitmatrix.hpp"

namespace eprldpc {

/// p x p binary matrix acting on LSB-first bit vectors of field elements.
/// Either all-zero or full rank. rows[i] is a p-bit mask over columns.
struct MatrixLabel {
    int p = 0;
    std::vector<uint32_t> rows;

    bool is_zero() const {
        for (uint32_t r : rows)
            if (r) return false;
        return true;
    }

    /// y = L x on bit masks.
    uint32_t apply(uint32_t x) const {
        uint32_t y = 0;
        for (int i = 0; i < p; ++i) y |= static_cast<uint32_t>(__builtin_parity(rows[i] & x)) << i;
        return y;
    }

    /// y = L^T x on bit masks.
    uint32_t apply_transposed(uint32_t x) const {
        uint32_t y = 0;
        for (int i = 0; i < p; ++i)
            if ((x >> i) & 1) y ^= rows[i];
        return y;
    }

    BitMatrix to_bitmatrix() const;
    static MatrixLabel from_bitmatrix(const BitMatrix& m);

    bool operator==(const MatrixLabel& other) const { return p == other.p && rows == other.rows; }
};

MatrixLabel mul_labels(const MatrixLabel& a, const MatrixLabel& b);  // GF(2) product
int label_rank(const MatrixLabel& l);

/// GF(2^p) arithmetic context: log/antilog tables over a primitive
/// polynomial, companion-matrix labels, and the extender basis.
/// Bit order is LSB-first throughout (bit i = coefficient of x^i).
/// Immutable after construction; safe to share across threads.
class FieldContext {
public:
    /// Uses a fixed minimal-weight primitive polynomial for p in [2, 16]
    /// (recorded in serialized file headers for reproducibility).
    explicit FieldContext(int p);
    FieldContext(int p, uint32_t prim_poly);

    int p() const { return p_; }
    int q() const { return q_; }
    uint32_t prim_poly() const { return prim_poly_; }

    uint16_t add(uint16_t a, uint16_t b) const { return a ^ b; }
    uint16_t mul(uint16_t a, uint16_t b) const;
    uint16_t div(uint16_t a, uint16_t b) const;  // throws on b == 0
    uint16_t inv(uint16_t a) const;              // throws on a == 0
    uint16_t pow_alpha(int e) const;             // alpha^e, e mod (q-1)
    int log(uint16_t a) const;                   // discrete log; throws on 0

    /// Multiplication-by-u acting on bit vectors: label * bits(w) = bits(u*w).
    MatrixLabel companion_label(uint16_t u) const;

    /// Phi: p x (q-1); column j-1 is the LSB-first bit pattern of j.
    /// Parity-check matrix of the [q-1, q-1-p] Hamming code: every nonzero
    /// p-bit vector appears exactly once.
    BitMatrix extender_basis() const;

    static uint32_t default_prim_poly(int p);

private:
    int p_, q_;
    uint32_t prim_poly_;
    std::vector<uint16_t> exp_;  // exp_[i] = alpha^i, i in [0, q-2]
    std::vector<int> log_;       // log_[u] for u in [1, q-1]
};

} // namespace eprldpc
