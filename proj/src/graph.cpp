#include "eprldpc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "eprldpc/rng.hpp"

namespace eprldpc {

TannerGraph TannerGraph::from(const BitMatrix& m) {
    TannerGraph g;
    g.n_chk = m.n_rows();
    g.n_var = m.n_cols();
    g.chk_adj.resize(g.n_chk);
    g.var_adj.resize(g.n_var);
    for (int i = 0; i < g.n_chk; ++i) {
        g.chk_adj[i] = m.row(i);
        for (int c : m.row(i)) g.var_adj[c].push_back(i);
        g.n_edges += static_cast<long long>(m.row(i).size());
    }
    return g;
}

std::vector<int> TannerGraph::chk_degrees() const {
    std::vector<int> d(n_chk);
    for (int i = 0; i < n_chk; ++i) d[i] = static_cast<int>(chk_adj[i].size());
    return d;
}

std::vector<int> TannerGraph::var_degrees() const {
    std::vector<int> d(n_var);
    for (int v = 0; v < n_var; ++v) d[v] = static_cast<int>(var_adj[v].size());
    return d;
}

std::string GirthReport::summary() const {
    std::ostringstream os;
    if (cycle_free)
        os << "girth: 0 (cycle-free)";
    else if (girth == 0)
        os << "girth: > " << cap;
    else
        os << "girth: " << girth;
    for (const auto& [len, n] : counts)
        if (n) os << ", cycles[" << len << "]=" << n;
    return os.str();
}

namespace {

// Unified node ids: checks first, then variables.
struct CycleEnumerator {
    const TannerGraph& g;
    int cap;
    std::vector<uint8_t> on_path;
    std::vector<int> path;
    // callback(path) where path holds the cycle's node sequence
    std::function<void(const std::vector<int>&)> sink;
    long long budget = std::numeric_limits<long long>::max();
    bool truncated = false;

    explicit CycleEnumerator(const TannerGraph& graph, int cap_len) : g(graph), cap(cap_len) {
        on_path.assign(g.n_chk + g.n_var, 0);
    }

    const std::vector<int>& neighbors(int node) const {
        static const std::vector<int> empty;
        if (node < g.n_chk) return g.chk_adj[node];
        return g.var_adj[node - g.n_chk];
    }

    int to_node_var(int v) const { return g.n_chk + v; }

    void run() {
        const int total = g.n_chk + g.n_var;
        for (int s = 0; s < total && !truncated; ++s) {
            path.assign(1, s);
            on_path[s] = 1;
            dfs(s, s);
            on_path[s] = 0;
        }
    }

    void dfs(int s, int u) {
        if (--budget < 0) {
            truncated = true;
            return;
        }
        const bool u_is_chk = u < g.n_chk;
        for (int nb : neighbors(u)) {
            if (truncated) return;
            int w = u_is_chk ? to_node_var(nb) : nb;
            if (w == s && static_cast<int>(path.size()) >= 4) {
                if (path[1] < path.back()) sink(path);
                continue;
            }
            if (w <= s || on_path[w]) continue;
            if (static_cast<int>(path.size()) >= cap) continue;  // next edge would exceed cap
            path.push_back(w);
            on_path[w] = 1;
            dfs(s, w);
            on_path[w] = 0;
            path.pop_back();
        }
    }
};

bool is_forest(const TannerGraph& g) {
    const int total = g.n_chk + g.n_var;
    std::vector<int> parent(total);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int i = 0; i < g.n_chk; ++i) {
        for (int v : g.chk_adj[i]) {
            int a = find(i), b = find(g.n_chk + v);
            if (a == b) return false;
            parent[a] = b;
        }
    }
    return true;
}

} // namespace

GirthReport girth(const TannerGraph& g, int cap) {
    if (cap < 4 || cap % 2 != 0) throw std::invalid_argument("girth: cap must be even and >= 4");
    GirthReport rep;
    rep.cap = cap;
    CycleEnumerator en(g, cap);
    en.sink = [&](const std::vector<int>& path) {
        const int len = static_cast<int>(path.size());
        ++rep.counts[len];
        if (rep.girth == 0 || len < rep.girth) {
            rep.girth = len;
            rep.girth_edges.clear();
        }
        if (len == rep.girth) {
            for (int t = 0; t < len; ++t) {
                int a = path[t], b = path[(t + 1) % len];
                if (a > b) std::swap(a, b);
                rep.girth_edges.insert({a, b - g.n_chk});  // (check, var)
            }
        }
    };
    en.run();
    if (rep.girth == 0) rep.cycle_free = is_forest(g);
    return rep;
}

GirthReport girth(const BitMatrix& m, int cap) { return girth(TannerGraph::from(m), cap); }

void for_each_cycle(const TannerGraph& g, int cap,
                    const std::function<void(const std::vector<int>&)>& sink) {
    CycleEnumerator en(g, cap);
    en.sink = sink;
    en.run();
}

bool for_each_cycle_budgeted(const TannerGraph& g, int cap,
                             const std::function<void(const std::vector<int>&)>& sink,
                             long long step_budget) {
    CycleEnumerator en(g, cap);
    en.sink = sink;
    en.budget = step_budget;
    en.run();
    return !en.truncated;
}

namespace {

struct BlockPermView {
    int q;
    // perm(i, j): span of q-1 entries, local row -> local col, -1 when dead;
    // nullptr when the block is zero.
    std::function<const std::vector<int16_t>*(int, int)> block;
};

std::vector<MatrixCycle> matrix_cycles_impl(const BitMatrix& mother, const BlockPermView& view, int max_len) {
    TannerGraph mg = TannerGraph::from(mother);
    std::vector<MatrixCycle> out;
    CycleEnumerator en(mg, max_len);
    const int qm1 = view.q - 1;
    en.sink = [&](const std::vector<int>& path) {
        MatrixCycle mc;
        // Rotate so the sequence starts on a check node.
        std::vector<int> nodes = path;
        if (nodes[0] >= mg.n_chk) std::rotate(nodes.begin(), nodes.begin() + 1, nodes.end());
        const int k = static_cast<int>(nodes.size()) / 2;
        std::vector<int> chks(k), vars(k);
        for (int t = 0; t < k; ++t) {
            chks[t] = nodes[2 * t];
            vars[t] = nodes[2 * t + 1] - mg.n_chk;
        }
        for (int t = 0; t < k; ++t) {
            mc.positions.push_back({chks[t], vars[t]});
            mc.positions.push_back({chks[(t + 1) % k], vars[t]});
        }
        // Inverse partial permutations for the "entering" blocks.
        std::vector<std::vector<int16_t>> inv(k);
        std::vector<const std::vector<int16_t>*> fwd(k);
        bool complete = true;
        for (int t = 0; t < k && complete; ++t) {
            const auto* enter = view.block(chks[(t + 1) % k], vars[t]);        // block used to leave column vars[t]
            const auto* exit = view.block(chks[(t + 1) % k], vars[(t + 1) % k]);
            if (!enter || !exit) {
                complete = false;
                break;
            }
            inv[t].assign(qm1, -1);
            for (int r = 0; r < qm1; ++r)
                if ((*enter)[r] >= 0) inv[t][(*enter)[r]] = static_cast<int16_t>(r);
            fwd[t] = exit;
        }
        std::vector<int> crossing;
        if (complete) {
            for (int a0 = 0; a0 < qm1; ++a0) {
                int a = a0;
                std::vector<int> rows_used;
                bool alive = true;
                for (int t = 0; t < k; ++t) {
                    int r = inv[t][a];
                    if (r < 0) {
                        alive = false;
                        break;
                    }
                    int c = (*fwd[t])[r];
                    if (c < 0) {
                        alive = false;
                        break;
                    }
                    rows_used.push_back(chks[(t + 1) % k] * qm1 + r);
                    a = c;
                }
                if (alive && a == a0) {
                    mc.bit_cycle_present = true;
                    crossing.insert(crossing.end(), rows_used.begin(), rows_used.end());
                }
            }
        }
        std::sort(crossing.begin(), crossing.end());
        crossing.erase(std::unique(crossing.begin(), crossing.end()), crossing.end());
        mc.crossing_rows = std::move(crossing);
        out.push_back(std::move(mc));
    };
    en.run();
    return out;
}

} // namespace

std::vector<MatrixCycle> matrix_cycles(const BitMatrix& mother, const ExtendedMatrix& ext, int max_len) {
    if (mother.n_rows() != ext.blocks.block_rows || mother.n_cols() != ext.blocks.block_cols)
        throw std::invalid_argument("matrix_cycles: block structure mismatch");
    BlockPermView view{ext.q, [&](int i, int j) -> const std::vector<int16_t>* {
                           const auto& p = ext.perms[i][j];
                           return p.empty() ? nullptr : &p;
                       }};
    return matrix_cycles_impl(mother, view, max_len);
}

std::vector<MatrixCycle> matrix_cycles(const BitMatrix& mother, const EPRMatrix& ext, int max_len) {
    if (mother.n_rows() != ext.col_blocks.block_rows || mother.n_cols() != ext.col_blocks.block_cols)
        throw std::invalid_argument("matrix_cycles: block structure mismatch");
    BlockPermView view{ext.q, [&](int i, int j) -> const std::vector<int16_t>* {
                           const auto& p = ext.perms[i][j];
                           return p.empty() ? nullptr : &p;
                       }};
    return matrix_cycles_impl(mother, view, max_len);
}

namespace {

std::vector<std::vector<int16_t>> companion_perms(const FieldContext& ctx) {
    std::vector<std::vector<int16_t>> perms(ctx.q());  // index by field value, [0] unused
    for (int u = 1; u < ctx.q(); ++u) perms[u] = f_omega_perm(ctx.companion_label(static_cast<uint16_t>(u)), ctx.q());
    return perms;
}

bool four_cycle_hit(const std::vector<std::vector<int16_t>>& perms, int q, int u11, int u12, int u21, int u22) {
    // sigma = perm(u11) o inv(u12) o perm(u22) o inv(u21) on column values of
    // the first symbol block; a fixed point is a length-4 bit cycle.
    const int qm1 = q - 1;
    std::vector<int16_t> inv21(qm1), inv12(qm1);
    for (int r = 0; r < qm1; ++r) inv21[perms[u21][r]] = static_cast<int16_t>(r);
    for (int r = 0; r < qm1; ++r) inv12[perms[u12][r]] = static_cast<int16_t>(r);
    for (int a = 0; a < qm1; ++a) {
        int r = inv21[a];
        int b = perms[u22][r];
        int r2 = inv12[b];
        if (perms[u11][r2] == a) return true;
    }
    return false;
}

} // namespace

CycleProbabilityEstimate estimate_p4(const FieldContext& ctx, long long trials, uint64_t seed) {
    if (ctx.q() < 4) throw std::invalid_argument("estimate_p4: q must be >= 4");
    auto perms = companion_perms(ctx);
    CycleProbabilityEstimate est;
    est.q = ctx.q();
    est.cycle_length = 4;
    est.trials = trials;
    const int qm1 = ctx.q() - 1;
    for (long long t = 0; t < trials; ++t) {
        CounterRng rng(CounterRng::derive(seed, static_cast<uint64_t>(t), 0x70F4));
        int u11 = 1 + static_cast<int>(rng.below(0, qm1));
        int u12 = 1 + static_cast<int>(rng.below(1, qm1));
        int u21 = 1 + static_cast<int>(rng.below(2, qm1));
        int u22 = 1 + static_cast<int>(rng.below(3, qm1));
        if (four_cycle_hit(perms, ctx.q(), u11, u12, u21, u22)) ++est.hits;
    }
    est.estimate = trials ? static_cast<double>(est.hits) / static_cast<double>(trials) : 0.0;
    est.std_error = trials ? std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(trials)) : 0.0;
    return est;
}

CycleProbabilityEstimate estimate_p4_exhaustive(const FieldContext& ctx) {
    const int qm1 = ctx.q() - 1;
    if (static_cast<long long>(qm1) * qm1 * qm1 * qm1 > 10'000'000LL)
        throw std::invalid_argument("estimate_p4_exhaustive: field too large");
    auto perms = companion_perms(ctx);
    CycleProbabilityEstimate est;
    est.q = ctx.q();
    est.cycle_length = 4;
    est.exhaustive = true;
    for (int u11 = 1; u11 <= qm1; ++u11)
        for (int u12 = 1; u12 <= qm1; ++u12)
            for (int u21 = 1; u21 <= qm1; ++u21)
                for (int u22 = 1; u22 <= qm1; ++u22) {
                    ++est.trials;
                    if (four_cycle_hit(perms, ctx.q(), u11, u12, u21, u22)) ++est.hits;
                }
    est.estimate = static_cast<double>(est.hits) / static_cast<double>(est.trials);
    return est;
}

CycleProbabilityEstimate estimate_cycle_prob(const FieldContext& ctx, const std::vector<MatrixLabel>& label_set,
                                             int g_c, long long trials, uint64_t seed) {
    if (label_set.empty()) throw std::invalid_argument("estimate_cycle_prob: empty label set");
    if (g_c < 4 || g_c % 2 != 0) throw std::invalid_argument("estimate_cycle_prob: g_c must be even and >= 4");
    const int qm1 = ctx.q() - 1;
    const int k = g_c / 2;
    std::vector<std::vector<int16_t>> fwd, inv;
    for (const auto& l : label_set) {
        if (label_rank(l) != ctx.p()) throw std::invalid_argument("estimate_cycle_prob: label not full rank");
        auto p = f_omega_perm(l, ctx.q());
        std::vector<int16_t> pi(qm1);
        for (int r = 0; r < qm1; ++r) pi[p[r]] = static_cast<int16_t>(r);
        fwd.push_back(std::move(p));
        inv.push_back(std::move(pi));
    }
    CycleProbabilityEstimate est;
    est.q = ctx.q();
    est.cycle_length = g_c;
    est.trials = trials;
    std::vector<int> enter(k), exit(k);
    for (long long t = 0; t < trials; ++t) {
        CounterRng rng(CounterRng::derive(seed, static_cast<uint64_t>(t), 0xC1C7));
        for (int s = 0; s < k; ++s) {
            enter[s] = static_cast<int>(rng.below(2 * s, label_set.size()));
            exit[s] = static_cast<int>(rng.below(2 * s + 1, label_set.size()));
        }
        bool hit = false;
        for (int a0 = 0; a0 < qm1 && !hit; ++a0) {
            int a = a0;
            for (int s = 0; s < k; ++s) a = fwd[exit[s]][inv[enter[s]][a]];
            hit = (a == a0);
        }
        if (hit) ++est.hits;
    }
    est.estimate = trials ? static_cast<double>(est.hits) / static_cast<double>(trials) : 0.0;
    est.std_error = trials ? std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(trials)) : 0.0;
    return est;
}

bool label_pair_compatible(const std::vector<int16_t>& perm_a, const std::vector<int16_t>& perm_b) {
    const int n = static_cast<int>(perm_a.size());
    std::vector<int16_t> inv_a(n);
    for (int r = 0; r < n; ++r) inv_a[perm_a[r]] = static_cast<int16_t>(r);
    std::vector<uint8_t> seen(n, 0);
    for (int x = 0; x < n; ++x) {
        if (seen[x]) continue;
        int len = 0, y = x;
        do {
            seen[y] = 1;
            y = inv_a[perm_b[y]];
            ++len;
        } while (y != x);
        if (len == 1 || len % 2 == 0) return false;
    }
    return true;
}

int compatible_label_count(const FieldContext& ctx, const std::vector<MatrixLabel>& label_set) {
    const int n = static_cast<int>(label_set.size());
    std::vector<std::vector<int16_t>> perms;
    perms.reserve(n);
    for (const auto& l : label_set) perms.push_back(f_omega_perm(l, ctx.q()));
    std::vector<std::vector<uint8_t>> ok(n, std::vector<uint8_t>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) ok[i][j] = ok[j][i] = label_pair_compatible(perms[i], perms[j]);
    int best = n ? 1 : 0;
    for (int s = 0; s < n; ++s) {
        std::vector<int> clique{s};
        for (int c = 0; c < n; ++c) {
            if (c == s) continue;
            bool fits = true;
            for (int m : clique)
                if (!ok[m][c]) {
                    fits = false;
                    break;
                }
            if (fits) clique.push_back(c);
        }
        best = std::max(best, static_cast<int>(clique.size()));
    }
    return best;
}

DegreeDistributions degree_distributions(const BitMatrix& m) {
    TannerGraph g = TannerGraph::from(m);
    DegreeDistributions d;
    long long edges = g.n_edges;
    if (edges == 0) throw std::invalid_argument("degree_distributions: empty matrix");
    for (int i = 0; i < g.n_chk; ++i) {
        int deg = static_cast<int>(g.chk_adj[i].size());
        if (deg == 0) throw std::invalid_argument("degree_distributions: empty row");
        d.rho[deg] += static_cast<double>(deg) / static_cast<double>(edges);
    }
    for (int v = 0; v < g.n_var; ++v) {
        int deg = static_cast<int>(g.var_adj[v].size());
        if (deg == 0) throw std::invalid_argument("degree_distributions: empty column");
        d.lambda[deg] += static_cast<double>(deg) / static_cast<double>(edges);
    }
    return d;
}

} // namespace eprldpc
