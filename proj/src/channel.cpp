#include "eprldpc/channel.hpp"

#include <algorithm>
#include <stdexcept>

#include "eprldpc/rng.hpp"

namespace eprldpc {

ChannelModel ChannelModel::bsc(double eps, uint64_t seed) {
    if (eps < 0.0 || eps > 0.5) throw std::invalid_argument("bsc: crossover must lie in [0, 1/2]");
    return {ChannelKind::bsc, eps, seed};
}

ChannelModel ChannelModel::bec(double delta, uint64_t seed) {
    if (delta < 0.0 || delta > 1.0) throw std::invalid_argument("bec: erasure probability must lie in [0, 1]");
    return {ChannelKind::bec, delta, seed};
}

ChannelModel ChannelModel::biawgn_sigma(double sigma, uint64_t seed) {
    if (sigma <= 0.0) throw std::invalid_argument("biawgn: sigma must be positive");
    return {ChannelKind::biawgn, sigma, seed};
}

double ebn0_to_sigma(double ebn0_db, double rate) {
    if (rate <= 0.0 || rate >= 1.0) throw std::invalid_argument("ebn0_to_sigma: rate must lie in (0, 1)");
    return std::sqrt(1.0 / (2.0 * rate * std::pow(10.0, ebn0_db / 10.0)));
}

ChannelModel ChannelModel::biawgn_ebn0(double ebn0_db, double rate, uint64_t seed) {
    return biawgn_sigma(ebn0_to_sigma(ebn0_db, rate), seed);
}

Received transmit(const ChannelModel& ch, std::span<const uint8_t> bits, uint64_t frame) {
    Received rx;
    rx.kind = ch.kind;
    CounterRng rng(CounterRng::derive(ch.seed, frame, 0xC4A2));
    switch (ch.kind) {
        case ChannelKind::bsc: {
            rx.hard.resize(bits.size());
            for (size_t i = 0; i < bits.size(); ++i)
                rx.hard[i] = bits[i] ^ static_cast<uint8_t>(rng.bernoulli(i, ch.param));
            break;
        }
        case ChannelKind::bec: {
            rx.hard.assign(bits.begin(), bits.end());
            rx.erased.resize(bits.size());
            for (size_t i = 0; i < bits.size(); ++i) {
                rx.erased[i] = static_cast<uint8_t>(rng.bernoulli(i, ch.param));
                if (rx.erased[i]) rx.hard[i] = 0;
            }
            break;
        }
        case ChannelKind::biawgn: {
            rx.soft.resize(bits.size());
            for (size_t i = 0; i < bits.size(); ++i)
                rx.soft[i] = (1.0 - 2.0 * bits[i]) + ch.param * rng.gaussian(i);
            break;
        }
    }
    return rx;
}

LLRVector llr_init_direct(double sigma2, std::span<const double> y, std::span<const uint8_t> active) {
    if (!active.empty() && active.size() != y.size())
        throw std::invalid_argument("llr_init_direct: mask length mismatch");
    LLRVector llr(y.size());
    for (size_t i = 0; i < y.size(); ++i) {
        if (!active.empty() && !active[i]) continue;  // punctured: stays zero
        llr[i] = std::clamp(2.0 * y[i] / sigma2, -kLlrSaturation, kLlrSaturation);
    }
    return llr;
}

LLRVector llr_init_indirect(double sigma2, std::span<const double> ybar, const GeneratorSet& gens, int p) {
    const int q = gens.q, qm1 = q - 1;
    const int n = gens.n_sym();
    if (static_cast<int>(ybar.size()) != n * p) throw std::invalid_argument("llr_init_indirect: length mismatch");
    LLRVector llr(static_cast<size_t>(n) * qm1, 0.0);
    for (int j = 0; j < n; ++j) {
        for (int c = 0; c < qm1; ++c) {
            if (!gens.gens[j].active[c]) continue;
            const uint32_t value = static_cast<uint32_t>(c + 1);
            double mag = std::numeric_limits<double>::infinity();
            int hard = 0;
            bool any = false;
            for (int t = 0; t < p; ++t) {
                if (!((value >> t) & 1)) continue;
                double yv = ybar[j * p + t];
                mag = std::min(mag, std::abs(yv));
                hard ^= (yv < 0);
                any = true;
            }
            if (!any) throw std::invalid_argument("llr_init_indirect: empty source set");
            double v = std::clamp(2.0 * mag / sigma2, 0.0, kLlrSaturation);
            llr[static_cast<size_t>(j) * qm1 + c] = hard ? -v : v;
        }
    }
    return llr;
}

LLRVector llr_from_bsc(double eps, std::span<const uint8_t> hard) {
    double mag = eps <= 0.0 ? kLlrSaturation
                            : std::min(kLlrSaturation, std::log((1.0 - eps) / eps));
    LLRVector llr(hard.size());
    for (size_t i = 0; i < hard.size(); ++i) llr[i] = hard[i] ? -mag : mag;
    return llr;
}

LLRVector llr_from_bec(std::span<const uint8_t> values, std::span<const uint8_t> erased) {
    LLRVector llr(values.size(), 0.0);
    for (size_t i = 0; i < values.size(); ++i)
        if (!erased[i]) llr[i] = values[i] ? -kLlrSaturation : kLlrSaturation;
    return llr;
}

namespace {

void build_encoder(CodeSpec& spec) {
    const auto& ctx = *spec.ctx;
    const int m = spec.h.n_chk, n = spec.h.n_sym;
    std::vector<std::vector<uint16_t>> a(m, std::vector<uint16_t>(n, 0));
    for (int i = 0; i < m; ++i)
        for (const auto& [j, v] : spec.h.rows[i]) a[i][j] = v;
    int rank = 0;
    std::vector<int> pivots;
    for (int col = 0; col < n && rank < m; ++col) {
        int pr = -1;
        for (int i = rank; i < m; ++i)
            if (a[i][col]) {
                pr = i;
                break;
            }
        if (pr < 0) continue;
        std::swap(a[rank], a[pr]);
        uint16_t inv = ctx.inv(a[rank][col]);
        for (int j = col; j < n; ++j) a[rank][j] = ctx.mul(a[rank][j], inv);
        for (int i = 0; i < m; ++i) {
            if (i == rank || !a[i][col]) continue;
            uint16_t f = a[i][col];
            for (int j = col; j < n; ++j) a[i][j] = ctx.add(a[i][j], ctx.mul(f, a[rank][j]));
        }
        pivots.push_back(col);
        ++rank;
    }
    spec.rank_fq = rank;
    spec.pivot_cols = pivots;
    std::vector<uint8_t> is_pivot(n, 0);
    for (int c : pivots) is_pivot[c] = 1;
    for (int c = 0; c < n; ++c)
        if (!is_pivot[c]) spec.info_cols.push_back(c);
    spec.solve_rows.assign(rank, {});
    for (int k = 0; k < rank; ++k)
        for (int c : spec.info_cols)
            if (a[k][c]) spec.solve_rows[k].push_back({c, a[k][c]});
}

} // namespace

CodeSpec make_code_spec(const OptimizedCode& code) {
    CodeSpec spec;
    spec.ctx = code.ctx;
    spec.h = code.h;
    spec.img = code.img;
    spec.omega = code.omega;
    spec.omega_gens = GeneratorSet::full(*code.ctx, code.h.n_chk, code.h.n_sym);
    spec.omega_epr = apply_f_e(code.img, spec.omega_gens);
    spec.omega_e = code.omega_e;
    spec.gens = code.gens;
    spec.target_girth = code.report.target_girth;
    build_encoder(spec);
    spec.rank_omega_e = rank_f2(spec.omega_e.matrix);
    return spec;
}

CodeSpec make_code_spec(std::shared_ptr<const FieldContext> ctx, NonBinaryMatrix h, int target_girth,
                        TransmitMode mode) {
    CodeSpec spec;
    spec.ctx = std::move(ctx);
    spec.h = std::move(h);
    spec.img = binary_image(spec.h);
    spec.omega = build_omega(spec.img);
    spec.omega_gens = GeneratorSet::full(*spec.ctx, spec.h.n_chk, spec.h.n_sym);
    spec.gens = spec.omega_gens;
    spec.omega_epr = apply_f_e(spec.img, spec.omega_gens);
    spec.omega_e = spec.omega_epr;
    spec.target_girth = target_girth;
    spec.default_mode = mode;
    build_encoder(spec);
    spec.rank_omega_e = rank_f2(spec.omega_e.matrix);
    return spec;
}

std::vector<uint16_t> encode(const CodeSpec& spec, std::span<const uint16_t> info) {
    if (static_cast<int>(info.size()) != spec.n_sym() - spec.rank_fq)
        throw std::invalid_argument("encode: info length must be N - rank(H)");
    const auto& ctx = *spec.ctx;
    std::vector<uint16_t> x(spec.n_sym(), 0);
    for (size_t k = 0; k < info.size(); ++k) x[spec.info_cols[k]] = info[k];
    for (int k = 0; k < spec.rank_fq; ++k) {
        uint16_t acc = 0;
        for (const auto& [c, coef] : spec.solve_rows[k]) acc = ctx.add(acc, ctx.mul(coef, x[c]));
        x[spec.pivot_cols[k]] = acc;  // characteristic 2: negation is identity
    }
    return x;
}

std::vector<uint16_t> random_info(const CodeSpec& spec, uint64_t seed, uint64_t frame) {
    CounterRng rng(CounterRng::derive(seed, frame, 0x1F0));
    std::vector<uint16_t> info(spec.n_sym() - spec.rank_fq);
    for (size_t k = 0; k < info.size(); ++k)
        info[k] = static_cast<uint16_t>(rng.below(k, spec.ctx->q()));
    return info;
}

} // namespace eprldpc
