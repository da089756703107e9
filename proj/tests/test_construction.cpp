#include "doctest.h"

#include <numeric>
#include <set>

#include "eprldpc/channel.hpp"
#include "eprldpc/construction.hpp"
#include "eprldpc/rng.hpp"

using namespace eprldpc;

TEST_CASE("block set rows carry zero xor closure and the pair filter works") {
    FieldContext gf4(2);
    auto bs = build_block_set(gf4);
    REQUIRE(bs.rows.size() == 1);
    CHECK(bs.rows[0] == std::vector<int>{1, 2, 3});

    FieldContext gf16(4);
    auto bs16 = build_block_set(gf16);
    CHECK(bs16.rows.size() == 35);  // (q-1)(q-2)/6
    for (const auto& r : bs16.rows) {
        int acc = 0;
        for (int v : r) acc ^= v;
        CHECK(acc == 0);
        CHECK(r.size() == 3);
    }
    CHECK_FALSE(BlockSet::cycle_free_pair(bs16.rows[0], bs16.rows[0]));
    // {1,2,3} and {4,5,1} intersect in one column only
    std::vector<int> a{1, 2, 3}, b{1, 4, 5};
    CHECK(BlockSet::cycle_free_pair(a, b));
}

TEST_CASE("peg produces simple near-regular graphs with girth at least 6") {
    ConstructionConfig cfg;
    cfg.n_chk = 6;
    cfg.n_sym = 12;
    cfg.dv = 3;
    cfg.dc = 6;
    cfg.seed = 5;
    auto m = peg_mother(cfg);
    CHECK(m.nnz() == 36);
    for (int w : m.col_weights()) CHECK(w == 3);
    auto rep = girth(m, 8);
    CHECK((rep.cycle_free || rep.girth >= 4));

    cfg.n_chk = 30;
    cfg.n_sym = 60;
    for (uint64_t seed : {5ULL, 6ULL, 7ULL}) {
        cfg.seed = seed;
        auto m2 = peg_mother(cfg);
        CHECK(m2.nnz() == 180);
        for (int w : m2.col_weights()) CHECK(w == 3);
        for (int w : m2.row_weights()) CHECK(std::abs(w - 6) <= 1);
        auto rep2 = girth(m2, 8);
        CHECK(rep2.girth >= 6);
    }
}

TEST_CASE("peg is deterministic per seed") {
    ConstructionConfig cfg;
    cfg.n_chk = 10;
    cfg.n_sym = 20;
    cfg.seed = 77;
    CHECK(peg_mother(cfg) == peg_mother(cfg));
    cfg.seed = 78;
    // different seed is allowed to differ (not required, but these sizes do)
    auto other = peg_mother(cfg);
    cfg.seed = 77;
    CHECK((other != peg_mother(cfg) || true));
}

TEST_CASE("peg rejects infeasible degree targets") {
    ConstructionConfig cfg;
    cfg.n_chk = 5;
    cfg.n_sym = 12;
    cfg.dv = 3;
    cfg.dc = 6;  // 36 != 30
    CHECK_THROWS(peg_mother(cfg));
}

TEST_CASE("optimized labels break every length-4 label collision") {
    ConstructionConfig cfg;
    cfg.n_chk = 8;
    cfg.n_sym = 12;
    cfg.dv = 3;
    cfg.dc = 4;  // wait: 12*3 = 36, 8*? -> use explicit degrees
    cfg.var_degrees.assign(12, 2);
    cfg.chk_degrees.assign(8, 3);
    cfg.seed = 3;
    auto mother = peg_mother(cfg);
    // force some 4-cycles by adding a dense corner
    mother.set(0, 0);
    mother.set(0, 1);
    mother.set(1, 0);
    mother.set(1, 1);
    FieldContext ctx(3);
    auto img = optimize_labels(mother, ctx, 11);
    auto om = build_omega(img);
    auto cycles = matrix_cycles(img.mother(), om, 4);
    for (const auto& c : cycles) CHECK_FALSE(c.bit_cycle_present);
}

TEST_CASE("restricted label sets: degenerate sets are rejected") {
    FieldContext ctx(3);
    BitMatrix mother = BitMatrix::from_rows({{1, 1}, {1, 1}});
    std::vector<MatrixLabel> single{ctx.companion_label(3)};
    CHECK_THROWS_WITH_AS(optimize_labels_from_set(mother, ctx, single, 1) /* single label, 4-cycle */,
                         doctest::Contains("P = 1"), std::invalid_argument);
    std::vector<MatrixLabel> same{ctx.companion_label(3), ctx.companion_label(3)};
    CHECK_THROWS(optimize_labels_from_set(mother, ctx, same, 1));

    std::vector<MatrixLabel> companions;
    for (int u = 1; u < 8; ++u) companions.push_back(ctx.companion_label(static_cast<uint16_t>(u)));
    auto img = optimize_labels_from_set(mother, ctx, companions, 9);
    auto cycles = matrix_cycles(img.mother(), build_omega(img), 4);
    REQUIRE(cycles.size() == 1);
    CHECK_FALSE(cycles[0].bit_cycle_present);
}

TEST_CASE("cycle-free mothers pass through construction untouched") {
    FieldContext ctx(2);
    ConstructionConfig cfg;
    cfg.p = 2;
    cfg.target_girth = 6;
    cfg.psi = 2;
    BitMatrix mother = BitMatrix::from_rows({{1, 1, 0, 1}, {0, 1, 1, 0}});
    auto img = optimize_labels(mother, ctx, 4);
    auto cons = epr_construct(img, cfg, build_block_set(ctx));
    auto om = build_omega(img);
    CHECK(cons.omega_e.matrix == om.matrix);
    CHECK(cons.report.rows_zeroed == 0);
    CHECK(cons.report.replacement_rows == 0);
    CHECK(cons.gens.m_s() == 4 * 3);
}

TEST_CASE("row additions on a 4-cycle of weight-3 rows never leave weight-1 rows") {
    // Mother with one 4-cycle and weight-3 checks; labels chosen to collide.
    FieldContext ctx(2);
    BitMatrix mother = BitMatrix::from_rows({{1, 1, 1, 0}, {1, 1, 0, 1}});
    NonBinaryMatrix h;
    h.ctx = std::make_shared<FieldContext>(ctx);
    h.n_chk = 2;
    h.n_sym = 4;
    h.rows.resize(2);
    // identical labels on the shared symbols collide on the 4-cycle
    h.set(0, 0, 1);
    h.set(0, 1, 1);
    h.set(0, 2, 2);
    h.set(1, 0, 1);
    h.set(1, 1, 1);
    h.set(1, 3, 3);
    auto img = binary_image(h);
    ConstructionConfig cfg;
    cfg.p = 2;
    cfg.target_girth = 6;
    cfg.psi = 1;
    auto cons = epr_construct(img, cfg, build_block_set(ctx));
    CHECK(cons.report.row_additions > 0);
    for (int r = 0; r < cons.omega_e.matrix.n_rows(); ++r) CHECK(cons.omega_e.matrix.row(r).size() >= 2);
    // parity must be preserved through the additions
    auto words_ok = [&]() {
        for (uint32_t mask = 0; mask < 256; ++mask) {
            std::vector<uint16_t> x(4);
            for (int j = 0; j < 4; ++j) x[j] = (mask >> (2 * j)) & 3;
            auto syn = h.syndrome(x);
            if (wt_vector(syn) != 0) continue;
            auto v = extend_codeword(*h.ctx, to_bits(*h.ctx, x));
            std::vector<uint8_t> masked(v.bits.size());
            for (size_t c = 0; c < v.bits.size(); ++c) masked[c] = v.bits[c] & cons.omega_e.active[c];
            if (wt_vector(cons.omega_e.matrix.mul_vec(masked)) != 0) return false;
        }
        return true;
    }();
    CHECK(words_ok);
    auto census = girth(cons.omega_e.matrix, 4);
    CHECK(census.counts.count(4) == 0);
}

TEST_CASE("construction reaches girth 6 at q=8 on a (3,6) mother") {
    ConstructionConfig cfg;
    cfg.p = 3;
    cfg.n_chk = 30;
    cfg.n_sym = 60;
    cfg.target_girth = 6;
    cfg.seed = 21;
    auto mother = peg_mother(cfg);
    FieldContext ctx(3);
    auto img = optimize_labels(mother, ctx, cfg.seed);
    auto cons = epr_construct(img, cfg, build_block_set(ctx));
    auto census = girth(cons.omega_e.matrix, 6);
    CHECK((census.cycle_free || census.girth >= 6 || census.girth == 0));
    for (const auto& g : cons.gens.gens) CHECK(g.weight() >= 4);
    // parity on random codewords of the underlying non-binary code is
    // exercised in the decoder tests; here check the emitted structure
    CHECK(cons.report.m_s == cons.gens.m_s());
    CHECK(cons.omega_e.matrix.n_cols() == 60 * 7);
}

TEST_CASE("construction lifts the girth beyond the mother girth at q=16") {
    ConstructionConfig cfg;
    cfg.p = 4;
    cfg.n_chk = 20;
    cfg.n_sym = 40;
    cfg.target_girth = 8;
    cfg.seed = 13;
    auto mother = peg_mother(cfg);
    auto mg = girth(mother, 8);
    REQUIRE(!mg.cycle_free);  // these sizes have 6-cycles
    FieldContext ctx(4);
    auto img = optimize_labels(mother, ctx, cfg.seed, 6);
    auto cons = epr_construct(img, cfg, build_block_set(ctx));
    auto census = girth(cons.omega_e.matrix, 8);
    bool ok = census.cycle_free || census.girth == 0 || census.girth >= 8;
    CHECK(ok);
    for (const auto& g : cons.gens.gens) CHECK(g.weight() >= 8);
}

TEST_CASE("colliding labels are repaired by zeroing plus replacement blocks") {
    // A single symbol-level hexagon with identity labels everywhere: the loop
    // composite is the identity, so all q-1 parallel bit cycles exist and the
    // surgery must zero at least one row per bit cycle.
    auto ctx = std::make_shared<FieldContext>(3);
    NonBinaryMatrix h;
    h.ctx = ctx;
    h.n_chk = 3;
    h.n_sym = 3;
    h.rows.resize(3);
    h.set(0, 0, 1);
    h.set(0, 1, 1);
    h.set(1, 1, 1);
    h.set(1, 2, 1);
    h.set(2, 2, 1);
    h.set(2, 0, 1);
    auto img = binary_image(h);
    ConstructionConfig cfg;
    cfg.p = 3;
    cfg.target_girth = 8;
    auto cons = epr_construct(img, cfg, build_block_set(*ctx));
    CHECK(cons.report.rows_zeroed >= 7);
    auto census = girth(cons.omega_e.matrix, 8);
    CHECK((census.cycle_free || census.girth == 0 || census.girth >= 8));
    for (const auto& g : cons.gens.gens) CHECK(g.weight() >= 4);
    // parity still holds on the 8 codewords (x1 = x2 = x3)
    for (uint16_t u = 0; u < 8; ++u) {
        std::vector<uint16_t> x{u, u, u};
        REQUIRE(wt_vector(h.syndrome(x)) == 0);
        auto v = extend_codeword(*ctx, to_bits(*ctx, x));
        std::vector<uint8_t> masked(v.bits.size());
        for (size_t c = 0; c < v.bits.size(); ++c) masked[c] = v.bits[c] & cons.omega_e.active[c];
        CHECK(wt_vector(cons.omega_e.matrix.mul_vec(masked)) == 0);
    }
}

TEST_CASE("optimize_code terminates at the starting p when feasible") {
    ConstructionConfig cfg;
    cfg.p = 3;
    cfg.n_chk = 30;
    cfg.n_sym = 60;
    cfg.target_girth = 6;
    cfg.seed = 1;
    auto code = optimize_code(cfg);
    CHECK(code.ctx->p() == 3);
    auto census = girth(code.omega_e.matrix, 6);
    CHECK((census.cycle_free || census.girth == 0 || census.girth >= 6));
    // emitted generator floors
    for (const auto& g : code.gens.gens) CHECK(g.weight() > code.ctx->q() / 2 - 1);
}

TEST_CASE("optimize_code grows p for a harder girth target") {
    ConstructionConfig cfg;
    cfg.p = 2;
    cfg.n_chk = 12;
    cfg.n_sym = 24;
    cfg.target_girth = 8;
    cfg.seed = 6;
    auto code = optimize_code(cfg);
    CHECK(code.ctx->p() >= 2);
    auto census = girth(code.omega_e.matrix, 8);
    CHECK((census.cycle_free || census.girth == 0 || census.girth >= 8));
}

TEST_CASE("wide replacement blocks span two symbols and keep parity") {
    // Unoptimized labels at q=16 leave colliding hexagons; the zeroing then
    // carves real deficits and the wide blocks must fill them.
    ConstructionConfig cfg;
    cfg.p = 4;
    cfg.n_chk = 40;
    cfg.n_sym = 80;
    cfg.target_girth = 8;
    cfg.seed = 13;
    cfg.block_width = 2;
    auto mother = peg_mother(cfg);
    FieldContext ctx(4);
    auto img = optimize_labels(mother, ctx, cfg.seed);  // breaks 4-cycles only
    auto cons = epr_construct(img, cfg, build_block_set(ctx));
    REQUIRE(cons.report.replacement_rows > 0);
    bool wide_seen = false;
    for (int r = 0; r < cons.omega_e.matrix.n_rows(); ++r) {
        if (cons.omega_e.tags[r].kind != EPRMatrix::RowKind::replacement) continue;
        std::set<int> syms;
        for (int c : cons.omega_e.matrix.row(r)) syms.insert(c / 15);
        wide_seen |= syms.size() == 2;
    }
    CHECK(wide_seen);
    // parity across the full pipeline
    NonBinaryMatrix h;
    h.ctx = std::make_shared<FieldContext>(ctx);
    h.n_chk = mother.n_rows();
    h.n_sym = mother.n_cols();
    h.rows = img.source_entries;
    auto spec = make_code_spec(h.ctx, h, 0, TransmitMode::base);
    for (uint64_t f = 0; f < 8; ++f) {
        auto x = encode(spec, random_info(spec, 51, f));
        auto v = extend_codeword(to_bits(ctx, x), cons.gens, 4);
        CHECK(wt_vector(cons.omega_e.matrix.mul_vec(v.bits)) == 0);
    }
    auto census = girth(cons.omega_e.matrix, 8);
    CHECK((census.cycle_free || census.girth == 0 || census.girth >= 8));
    for (const auto& g : cons.gens.gens) CHECK(g.weight() >= 8);
}

TEST_CASE("block set rows materialize into two-row matrices") {
    FieldContext gf8(3);
    auto bs = build_block_set(gf8);
    auto m = bs.materialize(0, 3);
    CHECK(m.n_rows() == 2);
    CHECK(m.n_cols() == 7);
    for (int v : bs.rows[0]) CHECK(m.get(0, v - 1));
    for (int v : bs.rows[3]) CHECK(m.get(1, v - 1));
}

TEST_CASE("quantized irregular profile realizes the printed distributions") {
    // Rate-1/2 irregular profile over GF(16), edge perspective.
    const std::map<int, double> lambda{{2, 0.303}, {3, 0.337}, {4, 0.04}, {5, 0.113}, {7, 0.122}, {13, 0.085}};
    const std::map<int, double> rho{{6, 0.85}, {7, 0.15}};
    auto [var_deg, chk_deg] = degree_sequences_from_profile(lambda, rho, 3000);
    REQUIRE(std::accumulate(var_deg.begin(), var_deg.end(), 0LL) ==
            std::accumulate(chk_deg.begin(), chk_deg.end(), 0LL));
    ConstructionConfig cfg;
    cfg.n_sym = static_cast<int>(var_deg.size());
    cfg.n_chk = static_cast<int>(chk_deg.size());
    cfg.var_degrees = var_deg;
    cfg.chk_degrees = chk_deg;
    cfg.seed = 616;
    auto mother = peg_mother(cfg);
    auto dd = degree_distributions(mother);
    for (const auto& [d, f] : lambda) {
        REQUIRE(dd.lambda.count(d));
        CHECK(std::abs(dd.lambda.at(d) - f) < 0.02);
    }
    double rho_mass_67 = 0;
    for (const auto& [d, f] : dd.rho) {
        if (d == 6 || d == 7)
            rho_mass_67 += f;
        else
            CHECK(f < 0.03);  // slack absorption may spill into neighbor degrees
    }
    CHECK(rho_mass_67 > 0.94);
    CHECK(std::abs(dd.rho.count(6) ? dd.rho.at(6) - 0.85 : -0.85) < 0.05);
    // the expansion inherits the profile exactly
    FieldContext ctx(4);
    auto img = optimize_labels(mother, ctx, 99);
    auto od = degree_distributions(build_omega(img).matrix);
    for (const auto& [d, f] : dd.lambda) CHECK(od.lambda.at(d) == doctest::Approx(f));
    for (const auto& [d, f] : dd.rho) CHECK(od.rho.at(d) == doctest::Approx(f));
}

TEST_CASE("optimize_code exhausts on an impossible target") {
    ConstructionConfig cfg;
    cfg.p = 2;
    cfg.n_chk = 10;
    cfg.n_sym = 20;
    cfg.target_girth = 20;
    cfg.max_p = 5;  // keep the failure loop quick
    cfg.seed = 2;
    CHECK_THROWS_AS(optimize_code(cfg), std::runtime_error);
}
