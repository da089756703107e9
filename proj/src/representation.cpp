#include "eprldpc/representation.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "eprldpc/rng.hpp"

namespace eprldpc {

uint16_t NonBinaryMatrix::at(int i, int j) const {
    for (const auto& [c, v] : rows.at(i))
        if (c == j) return v;
    return 0;
}

void NonBinaryMatrix::set(int i, int j, uint16_t v) {
    auto& row = rows.at(i);
    auto it = std::lower_bound(row.begin(), row.end(), j,
                               [](const auto& e, int col) { return e.first < col; });
    if (it != row.end() && it->first == j) {
        if (v)
            it->second = v;
        else
            row.erase(it);
    } else if (v) {
        row.insert(it, {j, v});
    }
}

std::vector<uint16_t> NonBinaryMatrix::syndrome_values(std::span<const uint16_t> x) const {
    std::vector<uint16_t> s(n_chk, 0);
    for (int i = 0; i < n_chk; ++i) {
        uint16_t acc = 0;
        for (const auto& [j, v] : rows[i]) acc = ctx->add(acc, ctx->mul(v, x[j]));
        s[i] = acc;
    }
    return s;
}

std::vector<uint8_t> NonBinaryMatrix::syndrome(std::span<const uint16_t> x) const {
    auto sv = syndrome_values(x);
    std::vector<uint8_t> s(sv.size());
    for (size_t i = 0; i < sv.size(); ++i) s[i] = sv[i] != 0;
    return s;
}

std::vector<uint8_t> to_bits(const FieldContext& ctx, std::span<const uint16_t> x) {
    std::vector<uint8_t> bits(x.size() * ctx.p());
    for (size_t j = 0; j < x.size(); ++j)
        for (int t = 0; t < ctx.p(); ++t) bits[j * ctx.p() + t] = (x[j] >> t) & 1;
    return bits;
}

std::vector<uint16_t> to_symbols(const FieldContext& ctx, std::span<const uint8_t> bits) {
    if (bits.size() % ctx.p() != 0) throw std::invalid_argument("to_symbols: length not a multiple of p");
    std::vector<uint16_t> x(bits.size() / ctx.p(), 0);
    for (size_t j = 0; j < x.size(); ++j)
        for (int t = 0; t < ctx.p(); ++t) x[j] |= static_cast<uint16_t>(bits[j * ctx.p() + t]) << t;
    return x;
}

MatrixLabel BinaryImage::label_at(int i, int j) const {
    for (const auto& [c, l] : labels.at(i))
        if (c == j) return l;
    MatrixLabel zero;
    zero.p = p;
    zero.rows.assign(p, 0);
    return zero;
}

BitMatrix BinaryImage::mother() const {
    BitMatrix m(blocks.block_rows, blocks.block_cols);
    for (int i = 0; i < blocks.block_rows; ++i)
        for (const auto& [c, l] : labels[i]) m.set(i, c);
    return m;
}

BinaryImage binary_image(const NonBinaryMatrix& h) {
    const auto& ctx = *h.ctx;
    BinaryImage img;
    img.p = ctx.p();
    img.blocks = BlockStructure{h.n_chk, h.n_sym, ctx.p(), ctx.p()};
    img.matrix = BitMatrix(h.n_chk * ctx.p(), h.n_sym * ctx.p());
    img.labels.resize(h.n_chk);
    img.source_entries = h.rows;
    for (int i = 0; i < h.n_chk; ++i) {
        for (const auto& [j, v] : h.rows[i]) {
            MatrixLabel l = ctx.companion_label(v);
            img.labels[i].push_back({j, l});
            for (int r = 0; r < ctx.p(); ++r) {
                uint32_t bits = l.rows[r];
                while (bits) {
                    int c = __builtin_ctz(bits);
                    img.matrix.set(i * ctx.p() + r, j * ctx.p() + c);
                    bits &= bits - 1;
                }
            }
        }
    }
    return img;
}

int GeneratorMatrix::rank(int p) const {
    std::vector<uint32_t> basis(p, 0);
    int rank = 0;
    for (size_t c = 0; c < active.size(); ++c) {
        if (!active[c]) continue;
        uint32_t v = static_cast<uint32_t>(c + 1);
        for (int b = p - 1; b >= 0; --b) {
            if (!((v >> b) & 1)) continue;
            if (basis[b]) {
                v ^= basis[b];
            } else {
                basis[b] = v;
                ++rank;
                break;
            }
        }
        if (rank == p) break;
    }
    return rank;
}

GeneratorSet GeneratorSet::full(const FieldContext& ctx, int n_chk, int n_sym) {
    GeneratorSet gs;
    gs.q = ctx.q();
    gs.gens.resize(n_sym);
    for (int j = 0; j < n_sym; ++j) {
        gs.gens[j].symbol = j;
        gs.gens[j].active.assign(ctx.q() - 1, 1);
    }
    std::vector<int> all(ctx.q() - 1);
    std::iota(all.begin(), all.end(), 0);
    gs.kept_rows.assign(n_chk, all);
    return gs;
}

long long GeneratorSet::m_s() const {
    long long s = 0;
    for (const auto& g : gens) s += g.weight();
    return s;
}

BitMatrix f_omega(const BitMatrix& basis_sel, const MatrixLabel& label) {
    const int p = label.p;
    const int qm1 = basis_sel.n_cols();
    if (basis_sel.n_rows() != p || qm1 != (1 << p) - 1)
        throw std::invalid_argument("f_omega: basis must be p x (2^p - 1)");
    // Validate basis_sel <= Phi: column c is either empty or bits(c+1).
    auto bt = basis_sel.transposed();
    std::vector<uint8_t> col_active(qm1, 0);
    for (int c = 0; c < qm1; ++c) {
        const auto& col = bt.row(c);
        if (col.empty()) continue;
        uint32_t mask = 0;
        for (int i : col) mask |= uint32_t(1) << i;
        if (mask != static_cast<uint32_t>(c + 1))
            throw std::invalid_argument("f_omega: basis is not a column-zeroed extender basis");
        col_active[c] = 1;
    }
    BitMatrix out(qm1, qm1);
    if (label.is_zero()) return out;
    if (label_rank(label) != p) throw std::invalid_argument("f_omega: label is neither zero nor full rank");
    for (int r = 0; r < qm1; ++r) {
        uint32_t t = label.apply_transposed(static_cast<uint32_t>(r + 1));
        if (t != 0 && col_active[t - 1]) out.set(r, static_cast<int>(t) - 1);
    }
    return out;
}

std::vector<int16_t> f_omega_perm(const MatrixLabel& label, int q) {
    std::vector<int16_t> perm(q - 1);
    for (int r = 0; r < q - 1; ++r) {
        uint32_t t = label.apply_transposed(static_cast<uint32_t>(r + 1));
        perm[r] = static_cast<int16_t>(t - 1);
    }
    return perm;
}

ExtendedMatrix build_omega(const BinaryImage& img) {
    const int p = img.p;
    const int q = 1 << p;
    const int M = img.blocks.block_rows, N = img.blocks.block_cols;
    ExtendedMatrix om;
    om.q = q;
    om.blocks = BlockStructure{M, N, q - 1, q - 1};
    om.matrix = BitMatrix(M * (q - 1), N * (q - 1));
    om.perms.assign(M, std::vector<std::vector<int16_t>>(N));
    for (int i = 0; i < M; ++i) {
        for (const auto& [j, l] : img.labels[i]) {
            om.perms[i][j] = f_omega_perm(l, q);
        }
        for (int r = 0; r < q - 1; ++r) {
            std::vector<int> cols;
            for (const auto& [j, l] : img.labels[i]) cols.push_back(j * (q - 1) + om.perms[i][j][r]);
            om.matrix.set_row(i * (q - 1) + r, std::move(cols));
        }
    }
    return om;
}

ExtendedCodeword extend_codeword(std::span<const uint8_t> xbar, const GeneratorSet& gens, int p) {
    const int q = gens.q;
    const int N = gens.n_sym();
    if (static_cast<int>(xbar.size()) != N * p)
        throw std::invalid_argument("extend_codeword: bit length != N*p");
    ExtendedCodeword v;
    v.q = q;
    v.bits.assign(static_cast<size_t>(N) * (q - 1), 0);
    for (int j = 0; j < N; ++j) {
        uint32_t xj = 0;
        for (int t = 0; t < p; ++t) xj |= static_cast<uint32_t>(xbar[j * p + t]) << t;
        for (int c = 0; c < q - 1; ++c) {
            if (!gens.gens[j].active[c]) continue;
            v.bits[static_cast<size_t>(j) * (q - 1) + c] =
                static_cast<uint8_t>(__builtin_parity(static_cast<uint32_t>(c + 1) & xj));
        }
    }
    v.m_s = gens.m_s();
    return v;
}

ExtendedCodeword extend_codeword(const FieldContext& ctx, std::span<const uint8_t> xbar) {
    auto gens = GeneratorSet::full(ctx, 1, static_cast<int>(xbar.size()) / ctx.p());
    return extend_codeword(xbar, gens, ctx.p());
}

ResolveResult resolve_symbol(std::span<const uint8_t> vj, const GeneratorMatrix& gen, int p) {
    // Solve bits(j')^T x = vj(j') over the active j'. Gaussian elimination on
    // p-bit masks with the rhs carried in bit p.
    std::vector<uint32_t> pivot(p, 0);
    for (size_t c = 0; c < gen.active.size(); ++c) {
        if (!gen.active[c]) continue;
        uint32_t eq = static_cast<uint32_t>(c + 1) | (static_cast<uint32_t>(vj[c] & 1) << p);
        for (int b = p - 1; b >= 0; --b) {
            if (!((eq >> b) & 1)) continue;
            if (pivot[b]) {
                eq ^= pivot[b];
            } else {
                pivot[b] = eq;
                break;
            }
        }
        if ((eq & ((1u << p) - 1)) == 0 && (eq >> p)) return {ResolveStatus::inconsistent, 0};
    }
    for (int b = 0; b < p; ++b)
        if (!pivot[b]) return {ResolveStatus::rank_deficient, 0};
    // Each pivot row leads at bit b and may carry lower bits: solve ascending.
    uint32_t x = 0;
    for (int b = 0; b < p; ++b) {
        uint32_t lower = pivot[b] & ((uint32_t(1) << b) - 1);
        uint32_t val = ((pivot[b] >> p) & 1) ^ (__builtin_parity(lower & x) & 1);
        x |= val << b;
    }
    return {ResolveStatus::ok, x};
}

namespace {

int mask_set_rank(const std::vector<uint32_t>& vals, int p) {
    std::vector<uint32_t> basis(p, 0);
    int rank = 0;
    for (uint32_t v : vals) {
        for (int b = p - 1; b >= 0; --b) {
            if (!((v >> b) & 1)) continue;
            if (basis[b]) {
                v ^= basis[b];
            } else {
                basis[b] = v;
                ++rank;
                break;
            }
        }
    }
    return rank;
}

unsigned long long binom_capped(int n, int k, unsigned long long cap) {
    unsigned long long r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<unsigned long long>(n - k + i) / static_cast<unsigned long long>(i);
        if (r > cap) return cap + 1;
    }
    return r;
}

} // namespace

ProbabilityFraction resolvability_probability(const FieldContext& ctx, int w, long long mc_trials, uint64_t seed) {
    const int q = ctx.q(), p = ctx.p();
    if (w < 1 || w > q - 1) throw std::invalid_argument("resolvability_probability: w out of range");
    if (w > q / 2 - 1) return {1, 1, true};
    unsigned long long total = binom_capped(q - 1, w, 2'000'000ULL);
    if (w == q / 2 - 1) {
        // Exactly the (p-1)-dimensional subspaces fail; there are q-1 of them.
        return {total - static_cast<unsigned long long>(q - 1), total, true};
    }
    if (total <= 1'000'000ULL) {
        // Exhaustive enumeration of w-subsets of the nonzero vectors.
        std::vector<int> idx(w);
        std::vector<uint32_t> vals(w);
        for (int i = 0; i < w; ++i) idx[i] = i;
        unsigned long long favorable = 0, count = 0;
        while (true) {
            for (int i = 0; i < w; ++i) vals[i] = static_cast<uint32_t>(idx[i] + 1);
            if (mask_set_rank(vals, p) == p) ++favorable;
            ++count;
            int i = w - 1;
            while (i >= 0 && idx[i] == q - 2 - (w - 1 - i)) --i;
            if (i < 0) break;
            ++idx[i];
            for (int k = i + 1; k < w; ++k) idx[k] = idx[k - 1] + 1;
        }
        return {favorable, count, true};
    }
    // Monte Carlo over random distinct subsets.
    CounterRng rng(CounterRng::derive(seed, 0xE5));
    unsigned long long favorable = 0;
    std::vector<uint32_t> vals;
    for (long long t = 0; t < mc_trials; ++t) {
        vals.clear();
        uint64_t ctr = static_cast<uint64_t>(t) * (2 * w + 8);
        while (static_cast<int>(vals.size()) < w) {
            uint32_t v = static_cast<uint32_t>(rng.below(ctr++, q - 1)) + 1;
            if (std::find(vals.begin(), vals.end(), v) == vals.end()) vals.push_back(v);
        }
        if (mask_set_rank(vals, p) == p) ++favorable;
    }
    return {favorable, static_cast<unsigned long long>(mc_trials), false};
}

EPRMatrix apply_f_e(const BinaryImage& img, const GeneratorSet& gens) {
    const int p = img.p;
    const int q = 1 << p;
    const int M = img.blocks.block_rows, N = img.blocks.block_cols;
    if (gens.q != q || gens.n_sym() != N || gens.n_chk() != M)
        throw std::invalid_argument("apply_f_e: generator set does not match the image");
    long long kept = 0;
    for (const auto& rows : gens.kept_rows) kept += static_cast<long long>(rows.size());
    if (kept == 0) throw std::invalid_argument("apply_f_e: degenerate selection, no rows kept");

    EPRMatrix epr;
    epr.q = q;
    epr.col_blocks = BlockStructure{M, N, q - 1, q - 1};
    epr.active.assign(static_cast<size_t>(N) * (q - 1), 0);
    for (int j = 0; j < N; ++j)
        for (int c = 0; c < q - 1; ++c)
            epr.active[static_cast<size_t>(j) * (q - 1) + c] = gens.gens[j].active[c];
    epr.perms.assign(M, std::vector<std::vector<int16_t>>(N));

    std::vector<std::vector<int>> row_cols;
    for (int i = 0; i < M; ++i) {
        std::vector<std::vector<int16_t>> perms(N);
        for (const auto& [j, l] : img.labels[i]) {
            if (label_rank(l) != p) throw std::invalid_argument("apply_f_e: label not full rank");
            perms[j] = f_omega_perm(l, q);
        }
        std::vector<std::vector<int16_t>> partial(N);
        for (const auto& [j, l] : img.labels[i]) partial[j].assign(q - 1, -1);
        for (int r : gens.kept_rows[i]) {
            if (r < 0 || r >= q - 1) throw std::invalid_argument("apply_f_e: selector row out of range");
            std::vector<int> cols;
            for (const auto& [j, l] : img.labels[i]) {
                int c = perms[j][r];
                if (!gens.gens[j].active[c])
                    throw std::invalid_argument("apply_f_e: selector references an inactive generator column");
                cols.push_back(j * (q - 1) + c);
                partial[j][r] = static_cast<int16_t>(c);
            }
            row_cols.push_back(std::move(cols));
            epr.tags.push_back({EPRMatrix::RowKind::omega, i, r, -1, -1, -1});
        }
        for (const auto& [j, l] : img.labels[i]) epr.perms[i][j] = std::move(partial[j]);
    }
    epr.matrix = BitMatrix(static_cast<int>(row_cols.size()), N * (q - 1));
    for (size_t r = 0; r < row_cols.size(); ++r) epr.matrix.set_row(static_cast<int>(r), std::move(row_cols[r]));
    return epr;
}

} // namespace eprldpc
