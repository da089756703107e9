#include "doctest.h"

#include "eprldpc/field.hpp"

using namespace eprldpc;

namespace {

// Independent oracle: carry-less polynomial multiplication reduced mod the
// primitive polynomial, no tables involved.
uint32_t poly_mul_mod(uint32_t a, uint32_t b, uint32_t poly, int p) {
    uint32_t acc = 0;
    for (int i = 0; b >> i; ++i)
        if ((b >> i) & 1) acc ^= a << i;
    for (int d = 2 * p - 2; d >= p; --d)
        if ((acc >> d) & 1) acc ^= poly << (d - p);
    return acc;
}

} // namespace

TEST_CASE("addition is characteristic-2 self-cancelling") {
    FieldContext gf4(2);
    CHECK(gf4.add(2, 2) == 0);  // alpha + alpha = 0
    CHECK(gf4.add(3, 1) == 2);
}

TEST_CASE("multiplication matches the polynomial oracle exhaustively") {
    for (int p : {2, 3, 4}) {
        FieldContext ctx(p);
        for (int a = 0; a < ctx.q(); ++a)
            for (int b = 0; b < ctx.q(); ++b)
                CHECK(ctx.mul(a, b) == poly_mul_mod(a, b, ctx.prim_poly(), p));
    }
}

TEST_CASE("named products") {
    FieldContext gf4(2);  // x^2 + x + 1
    CHECK(gf4.mul(2, 2) == 3);  // alpha * alpha = alpha + 1
    FieldContext gf8(3);  // x^3 + x + 1
    CHECK(gf8.mul(gf8.pow_alpha(3), gf8.pow_alpha(4)) == 1);  // alpha^7 = 1
}

TEST_CASE("division and inverse") {
    FieldContext gf8(3);
    for (int a = 1; a < 8; ++a) {
        CHECK(gf8.mul(a, gf8.inv(a)) == 1);
        for (int b = 1; b < 8; ++b) CHECK(gf8.mul(gf8.div(a, b), b) == a);
    }
    CHECK_THROWS(gf8.div(3, 0));
    CHECK_THROWS(gf8.inv(0));
    CHECK_THROWS(gf8.log(0));
}

TEST_CASE("log and antilog are inverse maps") {
    for (int p : {2, 3, 5}) {
        FieldContext ctx(p);
        for (int u = 1; u < ctx.q(); ++u) CHECK(ctx.pow_alpha(ctx.log(u)) == u);
        for (int i = 0; i < ctx.q() - 1; ++i) CHECK(ctx.log(ctx.pow_alpha(i)) == i);
    }
}

TEST_CASE("non-primitive polynomial is rejected") {
    // x^4 + x^3 + x^2 + x + 1 is irreducible but not primitive (order 5).
    CHECK_THROWS(FieldContext(4, 0x1F));
    CHECK_THROWS(FieldContext(1));
    CHECK_THROWS(FieldContext(17));
}

TEST_CASE("companion label of 1 is the identity, of 0 the zero matrix") {
    FieldContext gf4(2);
    CHECK(gf4.companion_label(1).to_bitmatrix() == BitMatrix::identity(2));
    FieldContext gf8(3);
    auto z = gf8.companion_label(0);
    CHECK(z.is_zero());
    CHECK(z.to_bitmatrix() == BitMatrix(3, 3));
}

TEST_CASE("companion label of alpha over GF(4)") {
    FieldContext gf4(2);
    // columns are bits(alpha*1) = bits(alpha) and bits(alpha*alpha) = bits(alpha+1)
    CHECK(gf4.companion_label(2).to_bitmatrix() == BitMatrix::from_rows({{0, 1}, {1, 1}}));
}

TEST_CASE("label action matches field multiplication column-wise") {
    for (int p : {2, 3, 4}) {
        FieldContext ctx(p);
        for (int u = 0; u < ctx.q(); ++u) {
            MatrixLabel l = ctx.companion_label(u);
            for (int w = 0; w < ctx.q(); ++w)
                CHECK(l.apply(static_cast<uint32_t>(w)) == ctx.mul(u, w));
        }
    }
}

TEST_CASE("companion map is a ring homomorphism with full-rank nonzero images") {
    for (int p : {2, 3, 4}) {
        FieldContext ctx(p);
        for (int u = 0; u < ctx.q(); ++u) {
            MatrixLabel lu = ctx.companion_label(u);
            if (u != 0) CHECK(label_rank(lu) == p);
            for (int v = 0; v < ctx.q(); ++v)
                CHECK(mul_labels(lu, ctx.companion_label(v)) == ctx.companion_label(ctx.mul(u, v)));
        }
    }
}

TEST_CASE("extender basis columns are the binary expansions") {
    FieldContext gf4(2);
    auto phi = gf4.extender_basis();
    CHECK(phi == BitMatrix::from_rows({{1, 0, 1}, {0, 1, 1}}));

    FieldContext gf8(3);
    auto phi8 = gf8.extender_basis();
    REQUIRE(phi8.n_cols() == 7);
    // column for value 5 is (1,0,1)
    CHECK(phi8.get(0, 4));
    CHECK_FALSE(phi8.get(1, 4));
    CHECK(phi8.get(2, 4));
}

TEST_CASE("extender basis enumerates every nonzero vector exactly once") {
    for (int p : {2, 3, 4, 5}) {
        FieldContext ctx(p);
        auto phi = ctx.extender_basis().transposed();
        std::vector<int> seen(ctx.q(), 0);
        for (int c = 0; c < phi.n_rows(); ++c) {
            uint32_t mask = 0;
            for (int i : phi.row(c)) mask |= 1u << i;
            CHECK(mask != 0);
            ++seen[mask];
        }
        for (int v = 1; v < ctx.q(); ++v) CHECK(seen[v] == 1);
    }
}
