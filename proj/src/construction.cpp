#include "eprldpc/construction.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include "eprldpc/rng.hpp"

namespace eprldpc {

bool BlockSet::cycle_free_pair(const std::vector<int>& r1, const std::vector<int>& r2) {
    int shared = 0;
    for (int a : r1)
        for (int b : r2)
            if (a == b) ++shared;
    return shared <= 1;
}

BitMatrix BlockSet::materialize(int r1, int r2) const {
    BitMatrix m(2, q - 1);
    for (int v : rows.at(r1)) m.set(0, v - 1);
    for (int v : rows.at(r2)) m.set(1, v - 1);
    return m;
}

BlockSet build_block_set(const FieldContext& ctx) {
    BlockSet bs;
    bs.q = ctx.q();
    for (int a = 1; a < ctx.q(); ++a)
        for (int b = a + 1; b < ctx.q(); ++b) {
            int c = a ^ b;
            if (c > b) bs.rows.push_back({a, b, c});
        }
    return bs;
}

BitMatrix peg_mother(const ConstructionConfig& cfg) {
    const int M = cfg.n_chk, N = cfg.n_sym;
    std::vector<int> var_deg = cfg.var_degrees.empty() ? std::vector<int>(N, cfg.dv) : cfg.var_degrees;
    std::vector<int> chk_cap = cfg.chk_degrees.empty() ? std::vector<int>(M, cfg.dc) : cfg.chk_degrees;
    if (static_cast<int>(var_deg.size()) != N || static_cast<int>(chk_cap.size()) != M)
        throw std::invalid_argument("peg_mother: degree sequence lengths");
    long long ve = std::accumulate(var_deg.begin(), var_deg.end(), 0LL);
    long long ce = std::accumulate(chk_cap.begin(), chk_cap.end(), 0LL);
    if (ve != ce || ve <= 0) throw std::invalid_argument("peg_mother: infeasible degree targets");
    for (int d : var_deg)
        if (d < 1 || d > M) throw std::invalid_argument("peg_mother: variable degree out of range");

    std::vector<std::vector<int>> var_adj(N), chk_adj(M);
    std::vector<int> chk_deg(M, 0);
    CounterRng rng(CounterRng::derive(cfg.seed, 0x9E6));
    uint64_t ctr = 0;

    // Process variables in non-decreasing target degree, stable.
    std::vector<int> order(N);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return var_deg[a] < var_deg[b]; });

    std::vector<int> dist(M);
    std::vector<int> vdist(N);
    for (int v : order) {
        for (int k = 0; k < var_deg[v]; ++k) {
            std::vector<int> cand;
            if (k == 0) {
                for (int c = 0; c < M; ++c)
                    if (chk_deg[c] < chk_cap[c]) cand.push_back(c);
            } else {
                // BFS over the current graph from v.
                std::fill(dist.begin(), dist.end(), -1);
                std::fill(vdist.begin(), vdist.end(), -1);
                std::queue<int> bfs;  // variable nodes
                vdist[v] = 0;
                bfs.push(v);
                while (!bfs.empty()) {
                    int u = bfs.front();
                    bfs.pop();
                    for (int c : var_adj[u]) {
                        if (dist[c] >= 0) continue;
                        dist[c] = vdist[u] + 1;
                        for (int w : chk_adj[c]) {
                            if (vdist[w] >= 0) continue;
                            vdist[w] = dist[c];
                            bfs.push(w);
                        }
                    }
                }
                // Prefer capacity-respecting checks at maximal depth; when the
                // best of those would close a 4-cycle, overflow a deeper check
                // instead (slight irregularity beats a short cycle).
                auto depth_of = [&](int c) { return dist[c] < 0 ? std::numeric_limits<int>::max() : dist[c]; };
                int best_capped = -1, best_any = -1;
                for (int c = 0; c < M; ++c) {
                    if (dist[c] == 1) continue;  // already adjacent: never a parallel edge
                    best_any = std::max(best_any, depth_of(c));
                    if (chk_deg[c] < chk_cap[c]) best_capped = std::max(best_capped, depth_of(c));
                }
                bool overflow = best_capped <= 2 && best_any > best_capped;
                int best_depth = overflow ? best_any : best_capped;
                if (best_depth < 0) throw std::invalid_argument("peg_mother: no placeable check");
                for (int c = 0; c < M; ++c) {
                    if (dist[c] == 1 || depth_of(c) != best_depth) continue;
                    if (!overflow && chk_deg[c] >= chk_cap[c]) continue;
                    cand.push_back(c);
                }
            }
            if (cand.empty()) throw std::invalid_argument("peg_mother: ran out of check capacity");
            int min_deg = chk_deg[cand[0]];
            for (int c : cand) min_deg = std::min(min_deg, chk_deg[c]);
            std::vector<int> ties;
            for (int c : cand)
                if (chk_deg[c] == min_deg) ties.push_back(c);
            int pick = ties[rng.below(ctr++, ties.size())];
            var_adj[v].push_back(pick);
            chk_adj[pick].push_back(v);
            ++chk_deg[pick];
        }
    }
    BitMatrix m(M, N);
    for (int v = 0; v < N; ++v)
        for (int c : var_adj[v]) m.set(c, v);
    return m;
}

std::pair<std::vector<int>, std::vector<int>> degree_sequences_from_profile(
    const std::map<int, double>& lambda, const std::map<int, double>& rho, long long target_edges) {
    auto quantize = [&](const std::map<int, double>& poly) {
        std::vector<std::pair<int, double>> want;  // (degree, fractional node count)
        for (const auto& [d, f] : poly) want.push_back({d, f * static_cast<double>(target_edges) / d});
        std::vector<int> counts(want.size());
        std::vector<std::pair<double, size_t>> rem;
        double placed = 0;
        for (size_t k = 0; k < want.size(); ++k) {
            counts[k] = static_cast<int>(want[k].second);
            placed += counts[k];
            rem.push_back({want[k].second - counts[k], k});
        }
        std::sort(rem.begin(), rem.end(), std::greater<>());
        double total = 0;
        for (const auto& [d, c] : want) total += c;
        for (size_t k = 0; k < rem.size() && placed < std::floor(total + 0.5); ++k, ++placed) ++counts[rem[k].second];
        std::vector<int> degrees;
        for (size_t k = 0; k < want.size(); ++k)
            for (int i = 0; i < counts[k]; ++i) degrees.push_back(want[k].first);
        return degrees;
    };
    std::vector<int> var_deg = quantize(lambda);
    std::vector<int> chk_deg = quantize(rho);
    long long ve = std::accumulate(var_deg.begin(), var_deg.end(), 0LL);
    long long ce = std::accumulate(chk_deg.begin(), chk_deg.end(), 0LL);
    // absorb the rounding slack on the check side, one edge per node
    size_t k = 0;
    while (ce < ve && !chk_deg.empty()) {
        ++chk_deg[k % chk_deg.size()];
        ++k;
        ++ce;
    }
    while (ce > ve && !chk_deg.empty()) {
        size_t idx = k % chk_deg.size();
        if (chk_deg[idx] > 1) {
            --chk_deg[idx];
            --ce;
        }
        ++k;
    }
    std::sort(var_deg.begin(), var_deg.end());
    std::sort(chk_deg.begin(), chk_deg.end());
    return {var_deg, chk_deg};
}

namespace {

struct FourCycle {
    int i1, j1, i2, j2;
};

std::vector<FourCycle> mother_four_cycles(const BitMatrix& mother) {
    std::vector<FourCycle> cycles;
    for (int i1 = 0; i1 < mother.n_rows(); ++i1) {
        for (int i2 = i1 + 1; i2 < mother.n_rows(); ++i2) {
            std::vector<int> shared;
            std::set_intersection(mother.row(i1).begin(), mother.row(i1).end(), mother.row(i2).begin(),
                                  mother.row(i2).end(), std::back_inserter(shared));
            for (size_t a = 0; a < shared.size(); ++a)
                for (size_t b = a + 1; b < shared.size(); ++b)
                    cycles.push_back({i1, shared[a], i2, shared[b]});
        }
    }
    return cycles;
}

BinaryImage image_from_label_grid(int p, const BitMatrix& mother,
                                  const std::vector<std::vector<MatrixLabel>>& grid) {
    BinaryImage img;
    img.p = p;
    img.blocks = BlockStructure{mother.n_rows(), mother.n_cols(), p, p};
    img.matrix = BitMatrix(mother.n_rows() * p, mother.n_cols() * p);
    img.labels.resize(mother.n_rows());
    for (int i = 0; i < mother.n_rows(); ++i) {
        for (int j : mother.row(i)) {
            const auto& l = grid[i][j];
            img.labels[i].push_back({j, l});
            for (int r = 0; r < p; ++r) {
                uint32_t bits = l.rows[r];
                while (bits) {
                    int c = __builtin_ctz(bits);
                    img.matrix.set(i * p + r, j * p + c);
                    bits &= bits - 1;
                }
            }
        }
    }
    return img;
}

} // namespace

BinaryImage optimize_labels(const BitMatrix& mother, const FieldContext& ctx, uint64_t seed, int max_cycle_len) {
    const int qm1 = ctx.q() - 1;
    CounterRng rng(CounterRng::derive(seed, 0x1AB));
    uint64_t ctr = 0;
    NonBinaryMatrix h;
    h.ctx = std::make_shared<FieldContext>(ctx);
    h.n_chk = mother.n_rows();
    h.n_sym = mother.n_cols();
    h.rows.resize(h.n_chk);
    for (int i = 0; i < h.n_chk; ++i)
        for (int j : mother.row(i)) h.set(i, j, static_cast<uint16_t>(1 + rng.below(ctr++, qm1)));

    // Constrain every symbol-level cycle up to max_cycle_len: the alternating
    // label product around a loop must differ from 1, otherwise every bit of
    // the loop closes simultaneously.
    struct Loop {
        std::vector<std::pair<int, int>> enter, exit;  // block positions per check step
    };
    std::vector<Loop> loops;
    TannerGraph mg = TannerGraph::from(mother);
    for_each_cycle_budgeted(
        mg, std::max(4, max_cycle_len),
        [&](const std::vector<int>& path) {
            std::vector<int> nodes = path;
            if (nodes[0] >= mg.n_chk) std::rotate(nodes.begin(), nodes.begin() + 1, nodes.end());
            const int k = static_cast<int>(nodes.size()) / 2;
            Loop loop;
            for (int t = 0; t < k; ++t) {
                int chk_next = nodes[2 * ((t + 1) % k)];
                int var_t = nodes[2 * t + 1] - mg.n_chk;
                int var_next = nodes[2 * ((t + 1) % k) + 1] - mg.n_chk;
                loop.enter.push_back({chk_next, var_t});
                loop.exit.push_back({chk_next, var_next});
            }
            loops.push_back(std::move(loop));
        },
        20'000'000LL);
    auto loop_product_is_one = [&](const Loop& loop) {
        uint16_t acc = 1;
        for (size_t t = 0; t < loop.enter.size(); ++t) {
            acc = ctx.div(acc, h.at(loop.enter[t].first, loop.enter[t].second));
            acc = ctx.mul(acc, h.at(loop.exit[t].first, loop.exit[t].second));
        }
        return acc == 1;
    };
    for (int pass = 0; pass < 16 && !loops.empty(); ++pass) {
        int collisions = 0;
        for (const auto& loop : loops) {
            if (!loop_product_is_one(loop)) continue;
            ++collisions;
            const auto [ri, rj] = loop.exit[0];
            for (int attempt = 0; attempt < 64 && loop_product_is_one(loop); ++attempt)
                h.set(ri, rj, static_cast<uint16_t>(1 + rng.below(ctr++, qm1)));
        }
        if (!collisions) break;
    }
    return binary_image(h);
}

BinaryImage optimize_labels_from_set(const BitMatrix& mother, const FieldContext& ctx,
                                     const std::vector<MatrixLabel>& label_set, uint64_t seed) {
    if (label_set.empty()) throw std::invalid_argument("optimize_labels_from_set: empty label set");
    for (const auto& l : label_set)
        if (label_rank(l) != ctx.p()) throw std::invalid_argument("optimize_labels_from_set: label not full rank");
    int pcount = compatible_label_count(ctx, label_set);
    if (pcount <= 1 && label_set.size() > 1)
        throw std::invalid_argument(
            "optimize_labels_from_set: degenerate label set, every pair collides (P = 1); "
            "every length-4 symbol cycle would carry bit cycles");
    if (label_set.size() == 1 && !mother_four_cycles(mother).empty())
        throw std::invalid_argument("optimize_labels_from_set: single label cannot break 4-cycles (P = 1)");

    std::vector<std::vector<int16_t>> perms;
    for (const auto& l : label_set) perms.push_back(f_omega_perm(l, ctx.q()));
    CounterRng rng(CounterRng::derive(seed, 0x1AC));
    uint64_t ctr = 0;
    std::vector<std::vector<int>> pick(mother.n_rows(), std::vector<int>(mother.n_cols(), -1));
    for (int i = 0; i < mother.n_rows(); ++i)
        for (int j : mother.row(i)) pick[i][j] = static_cast<int>(rng.below(ctr++, label_set.size()));

    auto cycles = mother_four_cycles(mother);
    auto collides = [&](const FourCycle& c) {
        const auto& p11 = perms[pick[c.i1][c.j1]];
        const auto& p12 = perms[pick[c.i1][c.j2]];
        const auto& p21 = perms[pick[c.i2][c.j1]];
        const auto& p22 = perms[pick[c.i2][c.j2]];
        const int n = static_cast<int>(p11.size());
        std::vector<int16_t> inv21(n), inv12(n);
        for (int r = 0; r < n; ++r) inv21[p21[r]] = static_cast<int16_t>(r);
        for (int r = 0; r < n; ++r) inv12[p12[r]] = static_cast<int16_t>(r);
        for (int a = 0; a < n; ++a)
            if (p11[inv12[p22[inv21[a]]]] == a) return true;
        return false;
    };
    for (int pass = 0; pass < 12; ++pass) {
        int collisions = 0;
        for (const auto& c : cycles) {
            if (!collides(c)) continue;
            ++collisions;
            for (int attempt = 0; attempt < 64 && collides(c); ++attempt)
                pick[c.i2][c.j2] = static_cast<int>(rng.below(ctr++, label_set.size()));
        }
        if (!collisions) break;
    }
    std::vector<std::vector<MatrixLabel>> grid(mother.n_rows(), std::vector<MatrixLabel>(mother.n_cols()));
    for (int i = 0; i < mother.n_rows(); ++i)
        for (int j : mother.row(i)) grid[i][j] = label_set[pick[i][j]];
    return image_from_label_grid(ctx.p(), mother, grid);
}

std::string ConstructionReport::to_string() const {
    std::ostringstream os;
    os << "p=" << p << " q=" << q << " target_girth=" << target_girth;
    if (girth_exceeds_cap)
        os << " achieved_girth>" << target_girth;
    else
        os << " achieved_girth=" << achieved_girth;
    os << " m_s=" << m_s << " rows=" << rows_emitted << " zeroed=" << rows_zeroed
       << " additions=" << row_additions << " replacements=" << replacement_rows
       << " selector_swaps=" << selector_swaps << " phi_violations=" << phi_violations << "\n";
    for (const auto& line : log) os << "  " << line << "\n";
    return os.str();
}

namespace {

/// Mutable state of the surgery: omega rows (alive flags, contents), extra
/// replacement rows, and a column adjacency for truncated distance checks.
struct Surgeon {
    int p, q, qm1, M, N, g;
    std::vector<std::vector<int>> row_cols;  // omega rows then extras
    std::vector<uint8_t> alive;
    std::vector<EPRMatrix::RowTag> tags;
    std::vector<std::vector<int>> col_rows;
    ExtendedMatrix om;
    int base_rows;

    Surgeon(const BinaryImage& img, int target_girth)
        : p(img.p), q(1 << img.p), qm1((1 << img.p) - 1), M(img.blocks.block_rows),
          N(img.blocks.block_cols), g(target_girth), om(build_omega(img)) {
        base_rows = M * qm1;
        row_cols.resize(base_rows);
        alive.assign(base_rows, 1);
        tags.resize(base_rows);
        col_rows.resize(static_cast<size_t>(N) * qm1);
        for (int i = 0; i < M; ++i) {
            for (int r = 0; r < qm1; ++r) {
                int id = i * qm1 + r;
                row_cols[id] = om.matrix.row(id);
                tags[id] = {EPRMatrix::RowKind::omega, i, r, -1, -1, -1};
                for (int c : row_cols[id]) col_rows[c].push_back(id);
            }
        }
    }

    void detach(int id) {
        for (int c : row_cols[id]) {
            auto& lst = col_rows[c];
            lst.erase(std::find(lst.begin(), lst.end(), id));
        }
    }

    void kill_perm_entries(int id) {
        if (tags[id].kind != EPRMatrix::RowKind::omega) return;
        int i = tags[id].check, r = tags[id].row;
        for (auto& perm_col : om.perms[i])
            if (!perm_col.empty()) perm_col[r] = -1;
    }

    void zero_row(int id) {
        if (!alive[id]) return;
        alive[id] = 0;
        detach(id);
        kill_perm_entries(id);
        row_cols[id].clear();
    }

    int add_extra(std::vector<int> cols, EPRMatrix::RowTag tag) {
        int id = static_cast<int>(row_cols.size());
        for (int c : cols) col_rows[c].push_back(id);
        row_cols.push_back(std::move(cols));
        alive.push_back(1);
        tags.push_back(tag);
        return id;
    }

    void pop_extra() {
        int id = static_cast<int>(row_cols.size()) - 1;
        for (int c : row_cols[id]) col_rows[c].pop_back();
        row_cols.pop_back();
        alive.pop_back();
        tags.pop_back();
    }

    /// True when cols a and b are within max_var_hops column hops of each
    /// other in the current graph (a cycle through a new row over both would
    /// then be shorter than the target girth).
    bool cols_too_close(int a, int b, int max_var_hops) const {
        if (a == b) return true;
        if (max_var_hops <= 0) return false;
        std::vector<int> frontier{a};
        std::set<int> seen_cols{a};
        std::set<int> seen_rows;
        for (int hop = 1; hop <= max_var_hops; ++hop) {
            std::vector<int> next;
            for (int c : frontier) {
                for (int rid : col_rows[c]) {
                    if (!alive[rid] || seen_rows.count(rid)) continue;
                    seen_rows.insert(rid);
                    for (int c2 : row_cols[rid]) {
                        if (c2 == b) return true;
                        if (seen_cols.insert(c2).second) next.push_back(c2);
                    }
                }
            }
            frontier = std::move(next);
            if (frontier.empty()) break;
        }
        return false;
    }

    bool row_placeable(const std::vector<int>& cols) const {
        const int hops = (g - 4) / 2;
        for (size_t a = 0; a < cols.size(); ++a)
            for (size_t b = a + 1; b < cols.size(); ++b)
                if (cols_too_close(cols[a], cols[b], hops)) return false;
        return true;
    }

    BitMatrix snapshot() const {
        BitMatrix m(static_cast<int>(row_cols.size()), N * qm1);
        for (size_t id = 0; id < row_cols.size(); ++id)
            if (alive[id]) m.set_row(static_cast<int>(id), row_cols[id]);
        return m;
    }

    std::vector<uint8_t> active_columns() const {
        std::vector<uint8_t> act(static_cast<size_t>(N) * qm1, 0);
        for (size_t id = 0; id < row_cols.size(); ++id)
            if (alive[id])
                for (int c : row_cols[id]) act[c] = 1;
        return act;
    }
};

} // namespace

EprConstruction epr_construct(const BinaryImage& img, const ConstructionConfig& cfg, const BlockSet& blocks) {
    const int p = img.p, q = 1 << p, qm1 = q - 1;
    const int M = img.blocks.block_rows, N = img.blocks.block_cols;
    const int g = cfg.target_girth;
    if (g < 4 || g % 2 != 0) throw std::invalid_argument("epr_construct: target girth must be even, >= 4");
    if (blocks.q != q) throw std::invalid_argument("epr_construct: block set built for a different field");
    int psi = cfg.psi < 0 ? q / 2 : cfg.psi;
    if (psi > qm1) throw std::invalid_argument("epr_construct: psi exceeds q-1");

    Surgeon s(img, g);
    ConstructionReport rep;
    rep.p = p;
    rep.q = q;
    rep.target_girth = g;
    auto mother = img.mother();

    // Weight-3 row-addition repair on length-4 bit cycles.
    if (g > 4) {
        auto cycles4 = mother_four_cycles(mother);
        bool changed = true;
        for (int pass = 0; pass < 8 && changed && !cycles4.empty(); ++pass) {
            changed = false;
            for (const auto& c : cycles4) {
                const auto& p11 = s.om.perms[c.i1][c.j1];
                const auto& p12 = s.om.perms[c.i1][c.j2];
                const auto& p21 = s.om.perms[c.i2][c.j1];
                const auto& p22 = s.om.perms[c.i2][c.j2];
                std::vector<int16_t> inv21(qm1, -1);
                for (int r = 0; r < qm1; ++r)
                    if (p21[r] >= 0) inv21[p21[r]] = static_cast<int16_t>(r);
                for (int r1 = 0; r1 < qm1; ++r1) {
                    if (p11[r1] < 0 || p12[r1] < 0) continue;
                    int r2 = inv21[p11[r1]];
                    if (r2 < 0 || p22[r2] < 0 || p22[r2] != p12[r1]) continue;
                    int id1 = c.i1 * qm1 + r1, id2 = c.i2 * qm1 + r2;
                    int w1 = static_cast<int>(s.row_cols[id1].size());
                    int w2 = static_cast<int>(s.row_cols[id2].size());
                    if (std::min(w1, w2) != 3) continue;
                    int target = w1 > w2 ? id1 : id2;
                    int source = target == id1 ? id2 : id1;
                    std::vector<int> sum;
                    std::set_symmetric_difference(s.row_cols[target].begin(), s.row_cols[target].end(),
                                                  s.row_cols[source].begin(), s.row_cols[source].end(),
                                                  std::back_inserter(sum));
                    if (static_cast<int>(sum.size()) < 2) continue;  // never leave a weight-1 row
                    s.detach(target);
                    s.kill_perm_entries(target);
                    auto old = s.tags[target];
                    s.tags[target] = {EPRMatrix::RowKind::addition, old.check, old.row, s.tags[source].check,
                                      s.tags[source].row, -1};
                    s.row_cols[target] = std::move(sum);
                    for (int col : s.row_cols[target]) s.col_rows[col].push_back(target);
                    ++rep.row_additions;
                    changed = true;
                }
            }
        }
        if (rep.row_additions)
            rep.log.push_back("row additions applied: " + std::to_string(rep.row_additions));
    }

    // Zero every row that carries a bit cycle shorter than the target girth.
    // Sweep lengths in increasing order so the graph thins before the deeper
    // (and costlier) enumerations run; abort as soon as a check drops below
    // its kept-row floor.
    const int phi = std::max(cfg.phi, 1);
    auto kept_count = [&](int i) {
        int n = 0;
        for (int r = 0; r < qm1; ++r) n += s.alive[i * qm1 + r];
        return n;
    };
    auto check_phi = [&]() {
        for (int i = 0; i < M; ++i)
            if (!mother.row(i).empty() && kept_count(i) < phi)
                throw GirthInfeasible("check " + std::to_string(i) + " keeps fewer than " + std::to_string(phi) +
                                      " rows after cycle removal");
    };
    if (g > 4) {
        for (int cap = 4; cap <= g - 2; cap += 2) {
            auto snap = s.snapshot();
            TannerGraph tg = TannerGraph::from(snap);
            std::vector<std::vector<int>> cycle_rows;
            bool complete = for_each_cycle_budgeted(
                tg, cap,
                [&](const std::vector<int>& path) {
                    std::vector<int> rows;
                    for (int node : path)
                        if (node < tg.n_chk) rows.push_back(node);
                    cycle_rows.push_back(std::move(rows));
                },
                60'000'000LL);
            if (!complete) throw GirthInfeasible("cycle census budget exceeded at length " + std::to_string(cap));
            if (cycle_rows.empty()) continue;
            // Greedy cover: repeatedly zero the row crossing the most still
            // unbroken cycles, so each matrix cycle loses at least one row at
            // minimal total damage.
            std::map<int, int> load;
            std::vector<uint8_t> broken(cycle_rows.size(), 0);
            for (const auto& rows : cycle_rows)
                for (int r : rows) ++load[r];
            size_t remaining = cycle_rows.size();
            while (remaining) {
                // Highest cycle coverage first; among ties prefer rows whose
                // check still keeps the most rows, so the damage spreads.
                int best = -1, best_load = 0, best_kept = -1;
                for (const auto& [r, n] : load) {
                    int kept = kept_count(r / qm1);
                    if (n > best_load || (n == best_load && kept > best_kept)) {
                        best_load = n;
                        best_kept = kept;
                        best = r;
                    }
                }
                s.zero_row(best);
                ++rep.rows_zeroed;
                for (size_t c = 0; c < cycle_rows.size(); ++c) {
                    if (broken[c]) continue;
                    if (std::find(cycle_rows[c].begin(), cycle_rows[c].end(), best) == cycle_rows[c].end()) continue;
                    broken[c] = 1;
                    --remaining;
                    for (int r : cycle_rows[c]) {
                        auto it = load.find(r);
                        if (it != load.end() && --it->second == 0) load.erase(it);
                    }
                }
                check_phi();
            }
        }
        if (rep.rows_zeroed)
            rep.log.push_back("rows zeroed across short matrix cycles: " + std::to_string(rep.rows_zeroed));
    }

    // Replacement-block placement: restore per-symbol active floors inside the
    // freed row budget, then densify while budget remains.
    int budget = rep.rows_zeroed;
    auto active = s.active_columns();
    auto wt_of = [&](int j) {
        int w = 0;
        for (int c = 0; c < qm1; ++c) w += active[static_cast<size_t>(j) * qm1 + c];
        return w;
    };
    std::vector<int> wt(N);
    for (int j = 0; j < N; ++j) wt[j] = wt_of(j);

    // Wide blocks span a second symbol; each half is a valid identity on its
    // own symbol, so the row still annihilates every valid extended word.
    auto partner_of = [&](int j) {
        int best = -1;
        for (int j2 = 0; j2 < N; ++j2) {
            if (j2 == j) continue;
            if (best < 0 || wt[j2] < wt[best]) best = j2;
        }
        return best;
    };
    auto try_place_block = [&](int j) -> bool {
        if (budget < 2) return false;
        const int base = j * qm1;
        const int j2 = cfg.block_width >= 2 ? partner_of(j) : -1;
        const int base2 = j2 >= 0 ? j2 * qm1 : 0;
        // rank candidate rows by how many inactive columns they would revive
        std::vector<int> order(blocks.rows.size());
        std::iota(order.begin(), order.end(), 0);
        auto revived = [&](int idx) {
            int n = 0;
            for (int v : blocks.rows[idx]) n += !active[base + v - 1];
            return n;
        };
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return revived(a) > revived(b); });
        auto cols_of = [&](int idx) {
            std::vector<int> cols;
            for (int v : blocks.rows[idx]) cols.push_back(base + v - 1);
            if (j2 >= 0)
                for (int v : blocks.rows[idx]) cols.push_back(base2 + v - 1);
            std::sort(cols.begin(), cols.end());
            return cols;
        };
        auto tag_of = [&](int idx) {
            int id = j2 >= 0 ? idx * 4096 + idx : idx;  // wide blocks reuse the triple on both halves
            return EPRMatrix::RowTag{EPRMatrix::RowKind::replacement, -1, -1, -1, -1, id};
        };
        const int scan_cap = 64;
        int scanned = 0;
        for (size_t a = 0; a < order.size() && scanned < scan_cap; ++a) {
            auto cols1 = cols_of(order[a]);
            if (!s.row_placeable(cols1)) {
                ++scanned;
                continue;
            }
            s.add_extra(cols1, tag_of(order[a]));
            for (size_t b = a + 1; b < order.size() && scanned < scan_cap; ++b) {
                ++scanned;
                if (!BlockSet::cycle_free_pair(blocks.rows[order[a]], blocks.rows[order[b]])) continue;
                auto cols2 = cols_of(order[b]);
                if (!s.row_placeable(cols2)) continue;
                s.add_extra(cols2, tag_of(order[b]));
                for (int c : cols1) active[c] = 1;
                for (int c : cols2) active[c] = 1;
                wt[j] = wt_of(j);
                if (j2 >= 0) wt[j2] = wt_of(j2);
                budget -= 2;
                rep.replacement_rows += 2;
                return true;
            }
            s.pop_extra();
        }
        return false;
    };

    // Phase 1: hard floors.
    while (true) {
        int worst = -1, worst_deficit = 0;
        for (int j = 0; j < N; ++j) {
            int d = psi - wt[j];
            if (d > worst_deficit) {
                worst_deficit = d;
                worst = j;
            }
        }
        if (worst < 0) break;
        int before = wt[worst];
        if (!try_place_block(worst) || wt[worst] <= before)
            throw GirthInfeasible("cannot reach the active floor for symbol " + std::to_string(worst) +
                                  " at girth " + std::to_string(g) + " (deficit " + std::to_string(worst_deficit) +
                                  ", budget " + std::to_string(budget) + ")");
    }
    // Phase 2: densify into the remaining budget.
    bool progress = true;
    while (budget >= 2 && progress) {
        progress = false;
        std::vector<int> order(N);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return wt[a] < wt[b]; });
        for (int j : order) {
            if (budget < 2) break;
            if (try_place_block(j)) progress = true;
        }
    }
    if (rep.replacement_rows)
        rep.log.push_back("replacement rows placed: " + std::to_string(rep.replacement_rows));

    // Emit.
    EprConstruction out;
    auto& epr = out.omega_e;
    epr.q = q;
    epr.col_blocks = BlockStructure{M, N, qm1, qm1};
    epr.active = s.active_columns();
    epr.perms = s.om.perms;
    std::vector<int> keep;
    for (size_t id = 0; id < s.row_cols.size(); ++id)
        if (s.alive[id] && !s.row_cols[id].empty()) keep.push_back(static_cast<int>(id));
    epr.matrix = BitMatrix(static_cast<int>(keep.size()), N * qm1);
    for (size_t r = 0; r < keep.size(); ++r) {
        epr.matrix.set_row(static_cast<int>(r), s.row_cols[keep[r]]);
        epr.tags.push_back(s.tags[keep[r]]);
    }

    out.gens.q = q;
    out.gens.gens.resize(N);
    for (int j = 0; j < N; ++j) {
        out.gens.gens[j].symbol = j;
        out.gens.gens[j].active.assign(epr.active.begin() + static_cast<size_t>(j) * qm1,
                                       epr.active.begin() + static_cast<size_t>(j + 1) * qm1);
    }
    out.gens.kept_rows.assign(M, {});
    for (const auto& tag : epr.tags)
        if (tag.kind == EPRMatrix::RowKind::omega) out.gens.kept_rows[tag.check].push_back(tag.row);
    for (auto& rows : out.gens.kept_rows) std::sort(rows.begin(), rows.end());

    for (int i = 0; i < M; ++i)
        if (!mother.row(i).empty() && static_cast<int>(out.gens.kept_rows[i].size()) < phi) ++rep.phi_violations;

    // Girth verification on the emitted matrix.
    auto census = girth(epr.matrix, g);
    if (!census.cycle_free && census.girth != 0 && census.girth < g)
        throw GirthInfeasible("verification found a length-" + std::to_string(census.girth) + " cycle");
    rep.achieved_girth = census.girth;
    rep.girth_exceeds_cap = census.exceeds_cap();
    rep.m_s = out.gens.m_s();
    rep.rows_emitted = epr.matrix.n_rows();
    out.report = rep;
    return out;
}

namespace {

/// Residual-cycle selector swaps: replace a surviving row that crosses a
/// residual length-g cycle by a previously unused row of the same check when
/// the replacement introduces nothing shorter than g and no column loses its
/// last covering row.
int selector_swap_pass(const BinaryImage& img, EprConstruction& cons, int g) {
    auto& epr = cons.omega_e;
    const int q = epr.q, qm1 = q - 1;
    const int N = epr.col_blocks.block_cols;
    std::vector<std::vector<int>> col_rows(static_cast<size_t>(N) * qm1);
    for (int r = 0; r < epr.matrix.n_rows(); ++r)
        for (int c : epr.matrix.row(r)) col_rows[c].push_back(r);

    TannerGraph tg = TannerGraph::from(epr.matrix);
    std::vector<std::vector<int>> cycle_rows;
    for_each_cycle(tg, g, [&](const std::vector<int>& path) {
        if (static_cast<int>(path.size()) != g) return;
        if (cycle_rows.size() >= 64) return;
        std::vector<int> rows;
        for (int node : path)
            if (node < tg.n_chk) rows.push_back(node);
        cycle_rows.push_back(std::move(rows));
    });

    auto cols_too_close = [&](int a, int b, int max_var_hops, int skip_row) {
        if (a == b) return true;
        std::vector<int> frontier{a};
        std::set<int> seen_cols{a}, seen_rows{skip_row};
        for (int hop = 1; hop <= max_var_hops; ++hop) {
            std::vector<int> next;
            for (int c : frontier)
                for (int rid : col_rows[c]) {
                    if (seen_rows.count(rid)) continue;
                    seen_rows.insert(rid);
                    for (int c2 : epr.matrix.row(rid)) {
                        if (c2 == b) return true;
                        if (seen_cols.insert(c2).second) next.push_back(c2);
                    }
                }
            frontier = std::move(next);
            if (frontier.empty()) break;
        }
        return false;
    };

    int swaps = 0;
    std::set<int> touched;
    for (const auto& rows : cycle_rows) {
        bool done = false;
        for (int rid : rows) {
            if (done) break;
            if (touched.count(rid)) continue;
            const auto& tag = epr.tags[rid];
            if (tag.kind != EPRMatrix::RowKind::omega) continue;
            int i = tag.check;
            auto& kept = cons.gens.kept_rows[i];
            // every column of the old row must stay covered
            bool covered = true;
            for (int c : epr.matrix.row(rid))
                if (col_rows[c].size() < 2) {
                    covered = false;
                    break;
                }
            if (!covered) continue;
            for (int r2 = 0; r2 < qm1 && !done; ++r2) {
                if (std::binary_search(kept.begin(), kept.end(), r2)) continue;
                std::vector<int> cols2;
                for (const auto& [j, l] : img.labels[i]) {
                    auto perm = f_omega_perm(l, q);
                    cols2.push_back(j * qm1 + perm[r2]);
                }
                std::sort(cols2.begin(), cols2.end());
                bool fits = true;
                const int hops = (g - 4) / 2;
                for (size_t a = 0; a < cols2.size() && fits; ++a)
                    for (size_t b = a + 1; b < cols2.size() && fits; ++b)
                        if (cols_too_close(cols2[a], cols2[b], hops, rid)) fits = false;
                if (!fits) continue;
                // commit: replace rid's content by the fresh selector row
                for (int c : epr.matrix.row(rid)) {
                    auto& lst = col_rows[c];
                    lst.erase(std::find(lst.begin(), lst.end(), rid));
                }
                for (const auto& [j, l] : img.labels[i]) {
                    epr.perms[i][j][tag.row] = -1;
                    epr.perms[i][j][r2] = static_cast<int16_t>(f_omega_perm(l, q)[r2]);
                }
                kept.erase(std::find(kept.begin(), kept.end(), tag.row));
                kept.insert(std::lower_bound(kept.begin(), kept.end(), r2), r2);
                epr.matrix.set_row(rid, cols2);
                epr.tags[rid].row = r2;
                for (int c : cols2) col_rows[c].push_back(rid);
                touched.insert(rid);
                ++swaps;
                done = true;
            }
        }
    }
    if (swaps) {
        // refresh activity masks
        std::vector<uint8_t> act(static_cast<size_t>(N) * qm1, 0);
        for (int r = 0; r < epr.matrix.n_rows(); ++r)
            for (int c : epr.matrix.row(r)) act[c] = 1;
        epr.active = act;
        for (int j = 0; j < N; ++j)
            cons.gens.gens[j].active.assign(act.begin() + static_cast<size_t>(j) * qm1,
                                            act.begin() + static_cast<size_t>(j + 1) * qm1);
        cons.report.m_s = cons.gens.m_s();
    }
    return swaps;
}

} // namespace

OptimizedCode optimize_code(const ConstructionConfig& cfg) {
    OptimizedCode out;
    out.mother = peg_mother(cfg);
    std::vector<std::string> attempts;
    const int label_cycle_cap = std::min(cfg.target_girth - 2, 10);
    for (int p = cfg.p; p <= cfg.max_p; ++p) {
        FieldContext ctx(p);
        auto img = optimize_labels(out.mother, ctx, cfg.seed, label_cycle_cap);
        auto blocks = build_block_set(ctx);
        ConstructionConfig local = cfg;
        local.p = p;
        try {
            auto cons = epr_construct(img, local, blocks);
            int swaps = selector_swap_pass(img, cons, cfg.target_girth);
            cons.report.selector_swaps = swaps;
            if (swaps) {
                cons.report.log.push_back("selector swaps on residual cycles: " + std::to_string(swaps));
                auto census = girth(cons.omega_e.matrix, cfg.target_girth - 2 >= 4 ? cfg.target_girth - 2 : 4);
                if (!census.cycle_free && census.girth != 0 && census.girth < cfg.target_girth)
                    throw GirthInfeasible("selector swap broke the girth contract");
            }
            out.ctx = std::make_shared<FieldContext>(p);
            out.img = img;
            // companion source entries are preserved by optimize_labels
            out.h.ctx = out.ctx;
            out.h.n_chk = out.mother.n_rows();
            out.h.n_sym = out.mother.n_cols();
            out.h.rows = img.source_entries;
            out.omega = build_omega(img);
            out.omega_e = std::move(cons.omega_e);
            out.gens = std::move(cons.gens);
            out.report = std::move(cons.report);
            for (const auto& a : attempts) out.report.log.push_back(a);
            return out;
        } catch (const GirthInfeasible& e) {
            attempts.push_back("p=" + std::to_string(p) + " infeasible: " + e.what());
        }
    }
    throw std::runtime_error("optimize_code: girth target unreachable for every p up to " +
                             std::to_string(cfg.max_p));
}

} // namespace eprldpc
