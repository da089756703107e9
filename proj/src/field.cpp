#include "eprldpc/field.hpp"

#include <stdexcept>

namespace eprldpc {

BitMatrix MatrixLabel::to_bitmatrix() const {
    BitMatrix m(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            if ((rows[i] >> j) & 1) m.set(i, j);
    return m;
}

MatrixLabel MatrixLabel::from_bitmatrix(const BitMatrix& m) {
    if (m.n_rows() != m.n_cols()) throw std::invalid_argument("label must be square");
    MatrixLabel l;
    l.p = m.n_rows();
    l.rows.assign(l.p, 0);
    for (int i = 0; i < l.p; ++i)
        for (int c : m.row(i)) l.rows[i] |= uint32_t(1) << c;
    return l;
}

MatrixLabel mul_labels(const MatrixLabel& a, const MatrixLabel& b) {
    if (a.p != b.p) throw std::invalid_argument("mul_labels: size mismatch");
    MatrixLabel out;
    out.p = a.p;
    out.rows.assign(a.p, 0);
    // row i of (A B) = row i of A combining rows of B
    for (int i = 0; i < a.p; ++i) {
        uint32_t acc = 0;
        for (int k = 0; k < a.p; ++k)
            if ((a.rows[i] >> k) & 1) acc ^= b.rows[k];
        out.rows[i] = acc;
    }
    return out;
}

int label_rank(const MatrixLabel& l) {
    std::vector<uint32_t> rows = l.rows;
    int rank = 0;
    for (int c = 0; c < l.p && rank < l.p; ++c) {
        int pivot = -1;
        for (int i = rank; i < l.p; ++i)
            if ((rows[i] >> c) & 1) {
                pivot = i;
                break;
            }
        if (pivot < 0) continue;
        std::swap(rows[rank], rows[pivot]);
        for (int i = 0; i < l.p; ++i)
            if (i != rank && ((rows[i] >> c) & 1)) rows[i] ^= rows[rank];
        ++rank;
    }
    return rank;
}

uint32_t FieldContext::default_prim_poly(int p) {
    // Minimal-weight primitive polynomials, LSB-first masks including x^p.
    static const uint32_t table[17] = {
        0, 0,
        0x7,      // x^2 + x + 1
        0xB,      // x^3 + x + 1
        0x13,     // x^4 + x + 1
        0x25,     // x^5 + x^2 + 1
        0x43,     // x^6 + x + 1
        0x89,     // x^7 + x^3 + 1
        0x11D,    // x^8 + x^4 + x^3 + x^2 + 1
        0x211,    // x^9 + x^4 + 1
        0x409,    // x^10 + x^3 + 1
        0x805,    // x^11 + x^2 + 1
        0x1053,   // x^12 + x^6 + x^4 + x + 1
        0x201B,   // x^13 + x^4 + x^3 + x + 1
        0x4443,   // x^14 + x^10 + x^6 + x + 1
        0x8003,   // x^15 + x + 1
        0x1100B,  // x^16 + x^12 + x^3 + x + 1
    };
    if (p < 2 || p > 16) throw std::invalid_argument("FieldContext: p must be in [2, 16]");
    return table[p];
}

FieldContext::FieldContext(int p) : FieldContext(p, default_prim_poly(p)) {}

FieldContext::FieldContext(int p, uint32_t prim_poly) : p_(p), q_(1 << p), prim_poly_(prim_poly) {
    if (p < 2 || p > 16) throw std::invalid_argument("FieldContext: p must be in [2, 16]");
    if ((prim_poly_ >> p_) != 1) throw std::invalid_argument("FieldContext: poly degree != p");
    exp_.assign(q_ - 1, 0);
    log_.assign(q_, -1);
    uint32_t x = 1;
    for (int i = 0; i < q_ - 1; ++i) {
        if (log_[x] != -1) throw std::invalid_argument("FieldContext: polynomial is not primitive");
        exp_[i] = static_cast<uint16_t>(x);
        log_[x] = i;
        x <<= 1;  // multiply by alpha = x
        if (x & (uint32_t(1) << p_)) x ^= prim_poly_;
    }
    if (x != 1) throw std::invalid_argument("FieldContext: polynomial is not primitive");
}

uint16_t FieldContext::mul(uint16_t a, uint16_t b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[(log_[a] + log_[b]) % (q_ - 1)];
}

uint16_t FieldContext::div(uint16_t a, uint16_t b) const {
    if (b == 0) throw std::domain_error("FieldContext::div: division by zero");
    if (a == 0) return 0;
    return exp_[(log_[a] - log_[b] + (q_ - 1)) % (q_ - 1)];
}

uint16_t FieldContext::inv(uint16_t a) const {
    if (a == 0) throw std::domain_error("FieldContext::inv: zero has no inverse");
    return exp_[(q_ - 1 - log_[a]) % (q_ - 1)];
}

uint16_t FieldContext::pow_alpha(int e) const {
    int m = e % (q_ - 1);
    if (m < 0) m += q_ - 1;
    return exp_[m];
}

int FieldContext::log(uint16_t a) const {
    if (a == 0) throw std::domain_error("FieldContext::log: log of zero");
    return log_[a];
}

MatrixLabel FieldContext::companion_label(uint16_t u) const {
    MatrixLabel l;
    l.p = p_;
    l.rows.assign(p_, 0);
    if (u == 0) return l;
    // column k = bits(u * x^k)
    for (int k = 0; k < p_; ++k) {
        uint16_t col = mul(u, static_cast<uint16_t>(1u << k));
        for (int i = 0; i < p_; ++i)
            if ((col >> i) & 1) l.rows[i] |= uint32_t(1) << k;
    }
    return l;
}

BitMatrix FieldContext::extender_basis() const {
    BitMatrix phi(p_, q_ - 1);
    for (int j = 1; j < q_; ++j)
        for (int i = 0; i < p_; ++i)
            if ((j >> i) & 1) phi.set(i, j - 1);
    return phi;
}

} // namespace eprldpc
