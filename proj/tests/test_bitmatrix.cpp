#include "doctest.h"

#include <array>

#include "eprldpc/bitmatrix.hpp"
#include "eprldpc/field.hpp"
#include "eprldpc/rng.hpp"

using namespace eprldpc;

namespace {

BitMatrix random_matrix(int r, int c, double density, uint64_t seed) {
    CounterRng rng(CounterRng::derive(seed));
    BitMatrix m(r, c);
    uint64_t ctr = 0;
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j)
            if (rng.uniform(ctr++) < density) m.set(i, j);
    return m;
}

} // namespace

TEST_CASE("rank of identity and zero") {
    CHECK(rank_f2(BitMatrix::identity(3)) == 3);
    CHECK(rank_f2(BitMatrix(2, 4)) == 0);
}

TEST_CASE("rank detects the dependent third row") {
    auto m = BitMatrix::from_rows({{1, 1, 0}, {0, 1, 1}, {1, 0, 1}});
    CHECK(rank_f2(m) == 2);
}

TEST_CASE("kron with identity equals block_diag of copies") {
    auto b = BitMatrix::from_rows({{1, 0, 1}, {1, 1, 0}});
    std::array<BitMatrix, 2> copies{b, b};
    CHECK(kron(BitMatrix::identity(2), b) == block_diag(copies));
}

TEST_CASE("kron dimension law") {
    auto a = random_matrix(2, 3, 0.5, 7);
    auto b = random_matrix(4, 5, 0.5, 8);
    auto k = kron(a, b);
    CHECK(k.n_rows() == 8);
    CHECK(k.n_cols() == 15);
}

TEST_CASE("permutation times its transpose is the identity") {
    auto p = BitMatrix::from_rows({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
    CHECK(gf2_mul(p, p.transposed()) == BitMatrix::identity(3));
}

TEST_CASE("gf2_mul rejects mismatched shapes") {
    CHECK_THROWS(gf2_mul(BitMatrix(2, 3), BitMatrix(4, 2)));
}

TEST_CASE("rank is multiplicative under kron") {
    for (uint64_t s = 0; s < 12; ++s) {
        auto a = random_matrix(3, 4, 0.45, 100 + s);
        auto b = random_matrix(4, 3, 0.45, 200 + s);
        CHECK(rank_f2(kron(a, b)) == rank_f2(a) * rank_f2(b));
    }
}

TEST_CASE("column weight and vector weight") {
    FieldContext gf4(2);
    CHECK(wt_columns(gf4.extender_basis()) == 3);
    CHECK(wt_columns(BitMatrix(3, 5)) == 0);
    std::vector<uint8_t> v{1, 0, 1, 1};
    CHECK(wt_vector(v) == 3);
}

TEST_CASE("precedes: reflexive, strict zeroing, altered column") {
    auto b = BitMatrix::from_rows({{1, 0, 1}, {0, 1, 1}});
    CHECK(precedes(b, b));
    CHECK_FALSE(precedes(b, b, /*strict=*/true));

    auto zeroed = b;
    // zero out column 2
    auto rows = BitMatrix(2, 3);
    rows.set(0, 0);
    rows.set(1, 1);
    CHECK(precedes(rows, b, /*strict=*/true));

    auto altered = BitMatrix::from_rows({{1, 0, 1}, {1, 1, 1}});  // column 0 changed
    CHECK_FALSE(precedes(altered, b));
    CHECK_THROWS(precedes(BitMatrix(1, 2), b));
}

TEST_CASE("precedes is a partial order on random column zeroings") {
    CounterRng rng(CounterRng::derive(42));
    uint64_t ctr = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto base = random_matrix(3, 6, 0.6, 300 + trial);
        BitMatrix a = base, b = base;
        auto bt = base.transposed();
        BitMatrix am(3, 6), bm(3, 6);
        for (int c = 0; c < 6; ++c) {
            bool keep_a = rng.uniform(ctr++) < 0.7;
            bool keep_b = keep_a || rng.uniform(ctr++) < 0.5;  // a's support inside b's
            for (int r : bt.row(c)) {
                if (keep_a) am.set(r, c);
                if (keep_b) bm.set(r, c);
            }
        }
        CHECK(precedes(am, bm));           // construction guarantees it
        CHECK(precedes(am, am));           // reflexive
        CHECK(precedes(bm, base));
        CHECK(precedes(am, base));         // transitive through bm
        if (precedes(bm, am)) CHECK(am == bm);  // antisymmetric
    }
}

TEST_CASE("extract_mother accepts companion blocks") {
    FieldContext gf4(2);
    BitMatrix host(2, 4);
    // [A_alpha | I2] as one block row
    auto a = gf4.companion_label(2).to_bitmatrix();
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            if (a.get(i, j)) host.set(i, j);
            if (i == j) host.set(i, 2 + j);
        }
    }
    auto ext = extract_mother(host, 2);
    CHECK(ext.p_reducible);
    CHECK(ext.mother == BitMatrix::from_rows({{1, 1}}));
}

TEST_CASE("extract_mother flags a rank-deficient block") {
    BitMatrix host(4, 4);
    host.set(0, 0);  // singular 2x2 block: one entry only
    host.set(2, 2);
    host.set(3, 3);
    auto ext = extract_mother(host, 2);
    CHECK_FALSE(ext.p_reducible);
    CHECK_THROWS(extract_mother(BitMatrix(3, 4), 2));
}

TEST_CASE("a Gallager-style (3,4)-regular length-12 code is 3-reducible") {
    // Three block rows of four 3x3 permutation blocks: column weight 3,
    // row weight 4, every block full rank.
    CounterRng rng(CounterRng::derive(99));
    BitMatrix h(9, 12);
    uint64_t ctr = 0;
    for (int bi = 0; bi < 3; ++bi) {
        for (int bj = 0; bj < 4; ++bj) {
            std::array<int, 3> perm{0, 1, 2};
            for (int k = 2; k > 0; --k) std::swap(perm[k], perm[rng.below(ctr++, k + 1)]);
            for (int r = 0; r < 3; ++r) h.set(bi * 3 + r, bj * 3 + perm[r]);
        }
    }
    auto rw = h.row_weights();
    auto cw = h.col_weights();
    for (int w : rw) CHECK(w == 4);
    for (int w : cw) CHECK(w == 3);
    auto ext = extract_mother(h, 3);
    CHECK(ext.p_reducible);
    CHECK(ext.mother.nnz() == 12);
}

TEST_CASE("extract then expand reproduces the input bit-exactly") {
    for (uint64_t s = 0; s < 6; ++s) {
        FieldContext gf8(3);
        CounterRng rng(CounterRng::derive(500 + s));
        BitMatrix host(9, 12);
        uint64_t ctr = 0;
        for (int bi = 0; bi < 3; ++bi)
            for (int bj = 0; bj < 4; ++bj) {
                if (rng.uniform(ctr++) < 0.4) continue;
                uint16_t u = 1 + static_cast<uint16_t>(rng.below(ctr++, 7));
                auto blk = gf8.companion_label(u).to_bitmatrix();
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        if (blk.get(i, j)) host.set(bi * 3 + i, bj * 3 + j);
            }
        auto ext = extract_mother(host, 3);
        std::vector<std::vector<BitMatrix>> blocks(3, std::vector<BitMatrix>(4));
        for (int bi = 0; bi < 3; ++bi)
            for (int bj = 0; bj < 4; ++bj) {
                BitMatrix blk(3, 3);
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        if (host.get(bi * 3 + i, bj * 3 + j)) blk.set(i, j);
                blocks[bi][bj] = blk;
            }
        CHECK(expand_mother(ext.mother, blocks) == host);
    }
}

TEST_CASE("integer rank of permutation sums distinguishes cycle parity") {
    // Two disjoint permutations whose relative permutation is one 3-cycle:
    // full integer rank despite GF(2) rank deficiency.
    auto p1 = BitMatrix::identity(3);
    auto p2 = BitMatrix::from_rows({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
    BitMatrix sum(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (p1.get(i, j) != p2.get(i, j)) sum.set(i, j);
    CHECK(rank_int(sum) == 3);
    CHECK(rank_f2(sum) == 2);

    // Relative permutation one 2-cycle plus a fixed point: deficient.
    auto p3 = BitMatrix::from_rows({{0, 1, 0}, {1, 0, 0}, {0, 0, 1}});
    BitMatrix sum2(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (p1.get(i, j) != p3.get(i, j)) sum2.set(i, j);
    CHECK(rank_int(sum2) < 3);
}
