#include "eprldpc/decoders.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "eprldpc/rng.hpp"

namespace eprldpc {

namespace {

constexpr double kTanhGuard = 1e-12;

int syndrome_weight(const std::vector<std::vector<int>>& chk_cols, std::span<const uint8_t> v,
                    std::vector<uint8_t>* z_out = nullptr) {
    int w = 0;
    if (z_out) z_out->assign(chk_cols.size(), 0);
    for (size_t r = 0; r < chk_cols.size(); ++r) {
        uint8_t acc = 0;
        for (int c : chk_cols[r]) acc ^= v[c];
        if (z_out) (*z_out)[r] = acc;
        w += acc;
    }
    return w;
}

void note_oscillation(DecodeResult& res) {
    const auto& t = res.syndrome_trace;
    const size_t n = t.size();
    if (n >= 4 && t[n - 1] == t[n - 3] && t[n - 2] == t[n - 4] && t[n - 1] != 0 &&
        !res.flip_trace.empty() && res.flip_trace.back() > 0)
        res.oscillation = true;
}

} // namespace

std::vector<std::vector<double>> symbol_priors(const FieldContext& ctx, const ChannelModel& ch, const Received& rx) {
    const int p = ctx.p(), q = ctx.q();
    const int n = static_cast<int>((rx.kind == ChannelKind::biawgn ? rx.soft.size() : rx.hard.size())) / p;
    std::vector<std::vector<double>> priors(n, std::vector<double>(q, 1.0));
    for (int j = 0; j < n; ++j) {
        for (int v = 0; v < q; ++v) {
            double lik = 1.0;
            for (int t = 0; t < p; ++t) {
                int bit = (v >> t) & 1;
                size_t pos = static_cast<size_t>(j) * p + t;
                switch (rx.kind) {
                    case ChannelKind::bsc:
                        lik *= (rx.hard[pos] == bit) ? (1.0 - ch.param) : ch.param;
                        break;
                    case ChannelKind::bec:
                        if (!rx.erased[pos] && rx.hard[pos] != bit) lik = 0.0;
                        break;
                    case ChannelKind::biawgn: {
                        double s = 1.0 - 2.0 * bit;
                        double d = rx.soft[pos] - s;
                        lik *= std::exp(-d * d / (2.0 * ch.sigma2()));
                        break;
                    }
                }
            }
            priors[j][v] = lik;
        }
        double sum = std::accumulate(priors[j].begin(), priors[j].end(), 0.0);
        if (sum <= 0.0) priors[j].assign(q, 1.0 / q);
        else
            for (double& x : priors[j]) x /= sum;
    }
    return priors;
}

DecodeResult decode_qspa(const NonBinaryMatrix& h, const std::vector<std::vector<double>>& priors, int max_iter) {
    const auto& ctx = *h.ctx;
    const int q = ctx.q();
    if (static_cast<int>(priors.size()) != h.n_sym) throw std::invalid_argument("decode_qspa: prior count");

    struct Edge {
        int chk, sym;
        uint16_t coef;
    };
    std::vector<Edge> edges;
    std::vector<std::vector<int>> chk_edges(h.n_chk), sym_edges(h.n_sym);
    for (int i = 0; i < h.n_chk; ++i)
        for (const auto& [j, v] : h.rows[i]) {
            chk_edges[i].push_back(static_cast<int>(edges.size()));
            sym_edges[j].push_back(static_cast<int>(edges.size()));
            edges.push_back({i, j, v});
        }
    const size_t ne = edges.size();
    std::vector<std::vector<double>> v2c(ne), c2v(ne, std::vector<double>(q, 1.0 / q));
    for (size_t e = 0; e < ne; ++e) v2c[e] = priors[edges[e].sym];

    DecodeResult res;
    std::vector<uint16_t> x_hat(h.n_sym, 0);
    auto xor_conv = [&](const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<double> out(q, 0.0);
        for (int s = 0; s < q; ++s) {
            if (a[s] == 0.0) continue;
            for (int t = 0; t < q; ++t) out[s ^ t] += a[s] * b[t];
        }
        return out;
    };

    for (int iter = 1; iter <= max_iter; ++iter) {
        // check update: convolve the coefficient-scaled message pmfs
        for (int i = 0; i < h.n_chk; ++i) {
            const auto& es = chk_edges[i];
            const int d = static_cast<int>(es.size());
            std::vector<std::vector<double>> scaled(d, std::vector<double>(q));
            for (int k = 0; k < d; ++k) {
                const auto& e = edges[es[k]];
                // pmf of y = coef * x
                for (int x = 0; x < q; ++x) scaled[k][ctx.mul(e.coef, static_cast<uint16_t>(x))] = v2c[es[k]][x];
            }
            std::vector<std::vector<double>> fwd(d + 1), bwd(d + 1);
            fwd[0].assign(q, 0.0);
            fwd[0][0] = 1.0;
            for (int k = 0; k < d; ++k) fwd[k + 1] = xor_conv(fwd[k], scaled[k]);
            bwd[d].assign(q, 0.0);
            bwd[d][0] = 1.0;
            for (int k = d - 1; k >= 0; --k) bwd[k] = xor_conv(bwd[k + 1], scaled[k]);
            for (int k = 0; k < d; ++k) {
                auto ext = xor_conv(fwd[k], bwd[k + 1]);  // pmf of the sum of the others
                const auto& e = edges[es[k]];
                auto& out = c2v[es[k]];
                // x must equal inv(coef) * (sum of others)
                for (int x = 0; x < q; ++x) out[x] = ext[ctx.mul(e.coef, static_cast<uint16_t>(x))];
                double sum = std::accumulate(out.begin(), out.end(), 0.0);
                if (sum <= 0.0) out.assign(q, 1.0 / q);
                else
                    for (double& v : out) v /= sum;
            }
        }
        // variable update and hard decision
        for (int j = 0; j < h.n_sym; ++j) {
            const auto& es = sym_edges[j];
            std::vector<double> post = priors[j];
            for (int e : es)
                for (int x = 0; x < q; ++x) post[x] *= std::max(c2v[e][x], 1e-300);
            int best = 0;
            for (int x = 1; x < q; ++x)
                if (post[x] > post[best]) best = x;
            x_hat[j] = static_cast<uint16_t>(best);
            for (int e : es) {
                auto& out = v2c[e];
                double sum = 0.0;
                for (int x = 0; x < q; ++x) {
                    out[x] = post[x] / std::max(c2v[e][x], 1e-300);
                    sum += out[x];
                }
                if (sum <= 0.0) out.assign(q, 1.0 / q);
                else
                    for (double& v : out) v /= sum;
            }
        }
        res.iterations = iter;
        auto syn = h.syndrome(x_hat);
        int w = wt_vector(syn);
        res.syndrome_trace.push_back(w);
        if (w == 0) {
            res.status = DecodeStatus::converged;
            break;
        }
    }
    res.x_hat = x_hat;
    res.xbar_hat = to_bits(ctx, x_hat);
    return res;
}

DecodeResult decode_binary_bp(const BitMatrix& hbar, const LLRVector& llr, int max_iter) {
    if (static_cast<int>(llr.size()) != hbar.n_cols()) throw std::invalid_argument("decode_binary_bp: LLR length");
    std::vector<std::vector<int>> chk_cols(hbar.n_rows());
    std::vector<std::vector<int>> chk_edge(hbar.n_rows());
    std::vector<std::vector<int>> var_edges(hbar.n_cols());
    int ne = 0;
    for (int i = 0; i < hbar.n_rows(); ++i) {
        chk_cols[i] = hbar.row(i);
        for (int c : chk_cols[i]) {
            chk_edge[i].push_back(ne);
            var_edges[c].push_back(ne);
            ++ne;
        }
    }
    std::vector<double> v2c(ne), c2v(ne, 0.0);
    {
        int e = 0;
        for (int i = 0; i < hbar.n_rows(); ++i)
            for (int c : chk_cols[i]) v2c[e++] = llr[c];
    }
    DecodeResult res;
    std::vector<uint8_t> hard(hbar.n_cols(), 0);
    std::vector<double> total(hbar.n_cols());
    for (int iter = 1; iter <= max_iter; ++iter) {
        for (int i = 0; i < hbar.n_rows(); ++i) {
            const auto& es = chk_edge[i];
            const int d = static_cast<int>(es.size());
            res.max_check_ops = std::max(res.max_check_ops, static_cast<long long>(d));
            std::vector<double> th(d);
            for (int k = 0; k < d; ++k) th[k] = std::tanh(v2c[es[k]] / 2.0);
            std::vector<double> pre(d + 1, 1.0), post(d + 1, 1.0);
            for (int k = 0; k < d; ++k) pre[k + 1] = pre[k] * th[k];
            for (int k = d - 1; k >= 0; --k) post[k] = post[k + 1] * th[k];
            for (int k = 0; k < d; ++k) {
                double prod = std::clamp(pre[k] * post[k + 1], -1.0 + kTanhGuard, 1.0 - kTanhGuard);
                c2v[es[k]] = 2.0 * std::atanh(prod);
            }
        }
        for (int c = 0; c < hbar.n_cols(); ++c) {
            double sum = llr[c];
            for (int e : var_edges[c]) sum += c2v[e];
            total[c] = sum;
            hard[c] = sum < 0.0;
            for (int e : var_edges[c])
                v2c[e] = std::clamp(sum - c2v[e], -kLlrSaturation, kLlrSaturation);
        }
        res.iterations = iter;
        int w = syndrome_weight(chk_cols, hard);
        res.syndrome_trace.push_back(w);
        if (w == 0) {
            res.status = DecodeStatus::converged;
            break;
        }
    }
    res.xbar_hat.assign(hard.begin(), hard.end());
    return res;
}

EprDecoder::EprDecoder(const EPRMatrix& m, const GeneratorSet& gens, int p, HybridSchedule sched)
    : m_(&m), gens_(&gens), p_(p), q_(1 << p), qm1_((1 << p) - 1), n_sym_(m.n_sym()), sched_(sched) {
    chk_cols_.resize(m.matrix.n_rows());
    col_rows_.resize(m.matrix.n_cols());
    for (int r = 0; r < m.matrix.n_rows(); ++r) {
        chk_cols_[r] = m.matrix.row(r);
        for (int c : chk_cols_[r]) col_rows_[c].push_back(r);
    }
    threshold_.resize(m.matrix.n_cols());
    for (int c = 0; c < m.matrix.n_cols(); ++c) {
        int d = static_cast<int>(col_rows_[c].size());
        threshold_[c] = sched_.flip_threshold > 0 ? sched_.flip_threshold : (d + 1) / 2;
        if (threshold_[c] < 1) threshold_[c] = 1;
    }
    pairs_.resize(n_sym_);
    for (int j = 0; j < n_sym_; ++j) {
        const auto& act = gens.gens[j].active;
        pairs_[j].resize(qm1_);
        for (int c = 0; c < qm1_; ++c) {
            if (!act[c]) continue;
            const int value = c + 1;
            for (int a = 1; a < q_; ++a) {
                int b = a ^ value;
                if (b <= a || b >= q_) continue;
                if (act[a - 1] && act[b - 1]) pairs_[j][c].push_back({a - 1, b - 1});
            }
        }
    }
    // complexity bound: max kept rows per check group vs max generator weight
    std::vector<int> rows_per_check;
    for (const auto& tag : m.tags) {
        if (tag.check < 0) continue;
        if (tag.check >= static_cast<int>(rows_per_check.size())) rows_per_check.resize(tag.check + 1, 0);
        ++rows_per_check[tag.check];
    }
    long long phi_e = 0, psi_e = 0;
    for (int n : rows_per_check) phi_e = std::max(phi_e, static_cast<long long>(n));
    for (const auto& g : gens.gens) psi_e = std::max(psi_e, static_cast<long long>(g.weight()));
    m_s_bound_ = std::max(phi_e, psi_e);
}

void EprDecoder::resolve_all(DecodeResult& res) const {
    res.xbar_hat.assign(static_cast<size_t>(n_sym_) * p_, 0);
    res.x_hat.assign(n_sym_, 0);
    bool all_ok = true;
    for (int j = 0; j < n_sym_; ++j) {
        std::span<const uint8_t> vj(res.ve_hat.data() + static_cast<size_t>(j) * qm1_, qm1_);
        auto r = resolve_symbol(vj, gens_->gens[j], p_);
        if (r.status != ResolveStatus::ok) {
            all_ok = false;
            continue;
        }
        res.x_hat[j] = static_cast<uint16_t>(r.x_bits);
        for (int t = 0; t < p_; ++t) res.xbar_hat[static_cast<size_t>(j) * p_ + t] = (r.x_bits >> t) & 1;
    }
    if (!all_ok && res.status == DecodeStatus::converged) res.status = DecodeStatus::inconsistent;
}

DecodeResult EprDecoder::decode_hard(std::span<const uint8_t> v_init, int max_iters) const {
    DecodeResult res;
    std::vector<uint8_t> v(v_init.begin(), v_init.end());
    std::vector<uint8_t> z;
    for (int iter = 1; iter <= max_iters; ++iter) {
        int w = syndrome_weight(chk_cols_, v, &z);
        if (w == 0) {
            res.status = DecodeStatus::converged;
            break;
        }
        // s = unsatisfied-check counts per extended bit (integer products)
        std::vector<int> s(col_rows_.size(), 0);
        for (size_t r = 0; r < chk_cols_.size(); ++r) {
            if (!z[r]) continue;
            for (int c : chk_cols_[r]) ++s[c];
        }
        std::vector<int> to_flip;
        for (size_t c = 0; c < col_rows_.size(); ++c) {
            if (s[c] < threshold_[c]) continue;
            const int j = static_cast<int>(c) / qm1_;
            const int local = static_cast<int>(c) % qm1_;
            if (!gens_->gens[j].active[local]) continue;
            bool disagree = false;
            const size_t base = static_cast<size_t>(j) * qm1_;
            for (const auto& [a, b] : pairs_[j][local]) {
                if ((v[base + a] ^ v[base + b]) != v[c]) {
                    disagree = true;
                    break;
                }
            }
            if (!disagree && sched_.k_max >= 3) {
                const auto& act = gens_->gens[j].active;
                const int value = local + 1;
                for (int a = 1; a < q_ && !disagree; ++a) {
                    if (!act[a - 1] || a == value) continue;
                    for (int b = a + 1; b < q_ && !disagree; ++b) {
                        if (!act[b - 1] || b == value) continue;
                        int c3 = a ^ b ^ value;
                        if (c3 <= b || c3 >= q_ || c3 == value || !act[c3 - 1]) continue;
                        if ((v[base + a - 1] ^ v[base + b - 1] ^ v[base + c3 - 1]) != v[c]) disagree = true;
                    }
                }
            }
            if (disagree) to_flip.push_back(static_cast<int>(c));
        }
        for (int c : to_flip) v[c] ^= 1;
        res.iterations = iter;
        res.flip_trace.push_back(static_cast<int>(to_flip.size()));
        res.syndrome_trace.push_back(syndrome_weight(chk_cols_, v));
        note_oscillation(res);
        if (res.syndrome_trace.back() == 0) {
            res.status = DecodeStatus::converged;
            break;
        }
        if (to_flip.empty()) break;  // stalled
    }
    if (res.syndrome_trace.empty() && res.status != DecodeStatus::converged) {
        // zero-iteration convergence check
        if (syndrome_weight(chk_cols_, v) == 0) res.status = DecodeStatus::converged;
    }
    res.ve_hat = std::move(v);
    resolve_all(res);
    return res;
}

DecodeResult EprDecoder::decode_awgn(const LLRVector& llr) const {
    if (llr.size() != col_rows_.size()) throw std::invalid_argument("decode_awgn: LLR length");
    DecodeResult res;
    const size_t ncols = col_rows_.size();
    std::vector<std::vector<int>> chk_edge(chk_cols_.size());
    std::vector<std::vector<int>> var_edges(ncols);
    int ne = 0;
    for (size_t r = 0; r < chk_cols_.size(); ++r)
        for (int c : chk_cols_[r]) {
            chk_edge[r].push_back(ne);
            var_edges[c].push_back(ne);
            ++ne;
        }
    std::vector<double> v2c(ne), c2v(ne, 0.0), total(ncols);
    {
        int e = 0;
        for (size_t r = 0; r < chk_cols_.size(); ++r)
            for (int c : chk_cols_[r]) v2c[e++] = llr[c];
    }
    std::vector<uint8_t> v(ncols, 0);
    bool converged = false;
    for (int round = 1; round <= sched_.rounds && !converged; ++round) {
        for (int it = 0; it < sched_.mu && !converged; ++it) {
            for (size_t r = 0; r < chk_cols_.size(); ++r) {
                const auto& es = chk_edge[r];
                const int d = static_cast<int>(es.size());
                res.max_check_ops = std::max(res.max_check_ops, static_cast<long long>(d));
                std::vector<double> th(d);
                for (int k = 0; k < d; ++k) th[k] = std::tanh(v2c[es[k]] / 2.0);
                std::vector<double> pre(d + 1, 1.0), post(d + 1, 1.0);
                for (int k = 0; k < d; ++k) pre[k + 1] = pre[k] * th[k];
                for (int k = d - 1; k >= 0; --k) post[k] = post[k + 1] * th[k];
                for (int k = 0; k < d; ++k) {
                    double prod = std::clamp(pre[k] * post[k + 1], -1.0 + kTanhGuard, 1.0 - kTanhGuard);
                    c2v[es[k]] = 2.0 * std::atanh(prod);
                }
            }
            for (size_t c = 0; c < ncols; ++c) {
                double sum = llr[c];
                for (int e : var_edges[c]) sum += c2v[e];
                total[c] = sum;
                v[c] = sum < 0.0;
                for (int e : var_edges[c])
                    v2c[e] = std::clamp(sum - c2v[e], -kLlrSaturation, kLlrSaturation);
            }
            ++res.iterations;
            int w = syndrome_weight(chk_cols_, v);
            res.syndrome_trace.push_back(w);
            res.flip_trace.push_back(0);
            if (w == 0) converged = true;
        }
        if (converged) break;
        // hard-decision phase on the current decisions, syndrome refreshed
        // every sub-iteration
        for (int it = 0; it < sched_.nu && !converged; ++it) {
            std::vector<uint8_t> z;
            int w = syndrome_weight(chk_cols_, v, &z);
            if (w == 0) {
                converged = true;
                break;
            }
            std::vector<int> s(ncols, 0);
            for (size_t r = 0; r < chk_cols_.size(); ++r) {
                if (!z[r]) continue;
                for (int c : chk_cols_[r]) ++s[c];
            }
            int flips = 0;
            for (size_t c = 0; c < ncols; ++c) {
                if (s[c] < threshold_[c]) continue;
                const int j = static_cast<int>(c) / qm1_;
                const int local = static_cast<int>(c) % qm1_;
                if (!gens_->gens[j].active[local]) continue;
                const size_t base = static_cast<size_t>(j) * qm1_;
                for (const auto& [a, b] : pairs_[j][local]) {
                    if ((v[base + a] ^ v[base + b]) != v[c]) {
                        v[c] ^= 1;
                        ++flips;
                        break;
                    }
                }
            }
            ++res.iterations;
            res.flip_trace.push_back(flips);
            res.syndrome_trace.push_back(syndrome_weight(chk_cols_, v));
            note_oscillation(res);
            if (res.syndrome_trace.back() == 0) converged = true;
            if (!flips) break;
        }
        // re-pin message signs to the hard decisions
        for (size_t c = 0; c < ncols; ++c)
            for (int e : var_edges[c]) v2c[e] = v[c] ? -std::abs(v2c[e]) : std::abs(v2c[e]);
    }
    res.status = converged ? DecodeStatus::converged : DecodeStatus::max_iter;
    res.ve_hat = std::move(v);
    resolve_all(res);
    return res;
}

DecodeResult EprDecoder::decode_bec(std::span<const uint8_t> values, std::span<const uint8_t> erased,
                                    uint64_t order_seed) const {
    if (values.size() != col_rows_.size() || erased.size() != col_rows_.size())
        throw std::invalid_argument("decode_bec: length mismatch");
    DecodeResult res;
    std::vector<uint8_t> v(values.begin(), values.end());
    std::vector<uint8_t> gap(erased.begin(), erased.end());
    const size_t ncols = col_rows_.size();
    for (size_t c = 0; c < ncols; ++c) {
        int j = static_cast<int>(c) / qm1_;
        if (!gens_->gens[j].active[c % qm1_]) {
            v[c] = 0;
            gap[c] = 0;  // inactive positions carry no information and no gap
        }
    }
    std::vector<size_t> col_order(ncols), row_order(chk_cols_.size());
    std::iota(col_order.begin(), col_order.end(), 0);
    std::iota(row_order.begin(), row_order.end(), 0);
    if (order_seed) {
        CounterRng rng(CounterRng::derive(order_seed, 0xBEC));
        uint64_t ctr = 0;
        for (size_t k = ncols; k > 1; --k) std::swap(col_order[k - 1], col_order[rng.below(ctr++, k)]);
        for (size_t k = row_order.size(); k > 1; --k) std::swap(row_order[k - 1], row_order[rng.below(ctr++, k)]);
    }
    bool changed = true;
    while (changed) {
        changed = false;
        // peel checks with exactly one erased neighbor
        for (size_t ri : row_order) {
            int gap_col = -1, gaps = 0;
            uint8_t acc = 0;
            for (int c : chk_cols_[ri]) {
                if (gap[c]) {
                    ++gaps;
                    gap_col = c;
                    if (gaps > 1) break;
                } else {
                    acc ^= v[c];
                }
            }
            if (gaps == 1) {
                v[gap_col] = acc;
                gap[gap_col] = 0;
                changed = true;
            }
        }
        // xor-index completion inside each symbol
        for (size_t ci : col_order) {
            if (!gap[ci]) continue;
            const int j = static_cast<int>(ci) / qm1_;
            const int local = static_cast<int>(ci) % qm1_;
            const size_t base = static_cast<size_t>(j) * qm1_;
            for (const auto& [a, b] : pairs_[j][local]) {
                if (gap[base + a] || gap[base + b]) continue;
                v[ci] = v[base + a] ^ v[base + b];
                gap[ci] = 0;
                changed = true;
                break;
            }
        }
        ++res.iterations;
        res.residual_erasures = std::count(gap.begin(), gap.end(), uint8_t(1));
        res.syndrome_trace.push_back(static_cast<int>(res.residual_erasures));
        if (!res.residual_erasures) break;
    }
    res.status = res.residual_erasures == 0 ? DecodeStatus::converged : DecodeStatus::max_iter;
    res.ve_hat = std::move(v);
    resolve_all(res);
    return res;
}

DecodeResult decode_hard_epr(const EPRMatrix& m, const GeneratorSet& gens, int p,
                             std::span<const uint8_t> v_init, const HybridSchedule& sched) {
    EprDecoder dec(m, gens, p, sched);
    return dec.decode_hard(v_init, sched.rounds * sched.nu);
}

DecodeResult decode_hybrid_sepr(const EPRMatrix& m, const GeneratorSet& gens, int p, const LLRVector& llr,
                                const HybridSchedule& sched) {
    EprDecoder dec(m, gens, p, sched);
    return dec.decode_awgn(llr);
}

DecodeResult decode_bec_hybrid(const EPRMatrix& m, const GeneratorSet& gens, int p,
                               std::span<const uint8_t> values, std::span<const uint8_t> erased,
                               const HybridSchedule& sched) {
    EprDecoder dec(m, gens, p, sched);
    return dec.decode_bec(values, erased);
}

} // namespace eprldpc
