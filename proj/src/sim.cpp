#include "eprldpc/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "eprldpc/rng.hpp"

namespace eprldpc {

std::string decoder_name(DecoderId id) {
    switch (id) {
        case DecoderId::qspa: return "qspa";
        case DecoderId::seb: return "seb";
        case DecoderId::hepr: return "hepr";
        case DecoderId::sepr: return "sepr";
        case DecoderId::ser: return "ser";
        case DecoderId::bec: return "bec";
    }
    return "?";
}

DecoderId decoder_from_name(const std::string& name) {
    if (name == "qspa") return DecoderId::qspa;
    if (name == "seb") return DecoderId::seb;
    if (name == "hepr") return DecoderId::hepr;
    if (name == "sepr") return DecoderId::sepr;
    if (name == "ser") return DecoderId::ser;
    if (name == "bec") return DecoderId::bec;
    throw std::invalid_argument("unknown decoder: " + name);
}

std::pair<double, double> binomial_ci(long long successes, long long trials) {
    if (trials <= 0) return {0.0, 1.0};
    const double z = 3.0;  // matches the three-standard-error convention used throughout
    double n = static_cast<double>(trials);
    double phat = static_cast<double>(successes) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (phat + z2 / (2.0 * n)) / denom;
    double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace {

struct FrameOutcome {
    long long bit_errors = 0;
    bool frame_error = false;
    bool undetected = false;
    int iterations = 0;
};

struct SweepContext {
    const CodeSpec& spec;
    const ExperimentPlan& plan;
    std::unique_ptr<EprDecoder> dec_epr;   // omega_e with its generators
    std::unique_ptr<EprDecoder> dec_full;  // plain extended matrix, full generators

    const GeneratorSet& tx_gens() const {
        return plan.decoder == DecoderId::ser ? spec.omega_gens : spec.gens;
    }
    const EPRMatrix& matrix() const {
        return plan.decoder == DecoderId::ser ? spec.omega_epr : spec.omega_e;
    }
};

void validate_plan(const CodeSpec& spec, const ExperimentPlan& plan) {
    if (plan.points.empty()) throw std::invalid_argument("run_sweep: empty channel grid");
    if (plan.min_frame_errors <= 0 || plan.max_frames <= 0)
        throw std::invalid_argument("run_sweep: stop rule must be positive");
    switch (plan.decoder) {
        case DecoderId::qspa:
        case DecoderId::seb:
            if (plan.mode != TransmitMode::base)
                throw std::invalid_argument("run_sweep: " + decoder_name(plan.decoder) +
                                            " decodes base-mode transmissions only");
            break;
        case DecoderId::hepr:
            if (plan.channel != ChannelKind::bsc)
                throw std::invalid_argument("run_sweep: hepr requires a binary symmetric channel");
            break;
        case DecoderId::sepr:
        case DecoderId::ser:
            if (plan.channel == ChannelKind::bec)
                throw std::invalid_argument("run_sweep: use the bec decoder for erasure channels");
            break;
        case DecoderId::bec:
            if (plan.channel != ChannelKind::bec)
                throw std::invalid_argument("run_sweep: the bec decoder requires an erasure channel");
            break;
    }
    (void)spec;
}

ChannelModel make_channel(const ExperimentPlan& plan, const CodeSpec& spec, double param, uint64_t seed) {
    switch (plan.channel) {
        case ChannelKind::bsc: return ChannelModel::bsc(param, seed);
        case ChannelKind::bec: return ChannelModel::bec(param, seed);
        case ChannelKind::biawgn: {
            double rate = spec.rate_for(plan.mode);
            return ChannelModel::biawgn_sigma(ebn0_to_sigma(param, rate), seed);
        }
    }
    throw std::logic_error("unreachable");
}

FrameOutcome run_frame(const SweepContext& ctx, int point_idx, double param, uint64_t frame,
                       DecodeResult* keep = nullptr) {
    const auto& spec = ctx.spec;
    const auto& plan = ctx.plan;
    const int p = spec.ctx->p();
    uint64_t info_seed = CounterRng::derive(plan.master_seed, 0x1F0A, static_cast<uint64_t>(point_idx));
    auto info = random_info(spec, info_seed, frame);
    auto x = encode(spec, info);
    auto xbar = to_bits(*spec.ctx, x);

    std::vector<uint8_t> tx_bits;
    if (plan.mode == TransmitMode::extended) {
        tx_bits = extend_codeword(xbar, ctx.tx_gens(), p).bits;
    } else {
        tx_bits = xbar;
    }
    uint64_t ch_seed = CounterRng::derive(plan.master_seed, 0xC4, static_cast<uint64_t>(point_idx));
    auto ch = make_channel(plan, spec, param, ch_seed);
    auto rx = transmit(ch, tx_bits, frame);

    FrameOutcome out;
    DecodeResult res;
    long long extended_denominator = 0;
    switch (plan.decoder) {
        case DecoderId::qspa: {
            auto priors = symbol_priors(*spec.ctx, ch, rx);
            res = decode_qspa(spec.h, priors, plan.max_iter);
            break;
        }
        case DecoderId::seb: {
            LLRVector llr;
            if (plan.channel == ChannelKind::biawgn)
                llr = llr_init_direct(ch.sigma2(), rx.soft);
            else if (plan.channel == ChannelKind::bsc)
                llr = llr_from_bsc(ch.param, rx.hard);
            else
                llr = llr_from_bec(rx.hard, rx.erased);
            res = decode_binary_bp(spec.img.matrix, llr, plan.max_iter);
            break;
        }
        case DecoderId::hepr: {
            std::vector<uint8_t> v_init;
            if (plan.mode == TransmitMode::extended)
                v_init = rx.hard;
            else
                v_init = extend_codeword(rx.hard, ctx.tx_gens(), p).bits;
            res = ctx.dec_epr->decode_hard(v_init, plan.sched.rounds * plan.sched.nu);
            break;
        }
        case DecoderId::sepr:
        case DecoderId::ser: {
            const auto& dec = plan.decoder == DecoderId::ser ? *ctx.dec_full : *ctx.dec_epr;
            LLRVector llr;
            if (plan.mode == TransmitMode::extended) {
                if (plan.channel == ChannelKind::biawgn)
                    llr = llr_init_direct(ch.sigma2(), rx.soft, ctx.matrix().active);
                else {
                    llr = llr_from_bsc(ch.param, rx.hard);
                    for (size_t c = 0; c < llr.size(); ++c)
                        if (!ctx.matrix().active[c]) llr[c] = 0.0;
                }
            } else {
                if (plan.channel == ChannelKind::biawgn)
                    llr = llr_init_indirect(ch.sigma2(), rx.soft, ctx.tx_gens(), p);
                else {
                    // saturated-magnitude variant of the indirect rule
                    std::vector<double> pseudo(rx.hard.size());
                    for (size_t i = 0; i < rx.hard.size(); ++i) pseudo[i] = rx.hard[i] ? -1.0 : 1.0;
                    double mag = ch.param <= 0.0 ? kLlrSaturation
                                                 : std::min(kLlrSaturation, std::log((1.0 - ch.param) / ch.param));
                    llr = llr_init_indirect(2.0 / mag, pseudo, ctx.tx_gens(), p);
                }
            }
            res = dec.decode_awgn(llr);
            break;
        }
        case DecoderId::bec: {
            std::vector<uint8_t> values, erased;
            if (plan.mode == TransmitMode::extended) {
                values = rx.hard;
                erased = rx.erased;
            } else {
                // an extended bit is erased when any source bit is erased
                const auto& gens = ctx.tx_gens();
                const int qm1 = spec.ctx->q() - 1;
                values.assign(static_cast<size_t>(spec.n_sym()) * qm1, 0);
                erased.assign(values.size(), 0);
                for (int j = 0; j < spec.n_sym(); ++j) {
                    for (int c = 0; c < qm1; ++c) {
                        if (!gens.gens[j].active[c]) continue;
                        uint8_t acc = 0, gap = 0;
                        for (int t = 0; t < p; ++t) {
                            if (!(((c + 1) >> t) & 1)) continue;
                            size_t pos = static_cast<size_t>(j) * p + t;
                            gap |= rx.erased[pos];
                            acc ^= rx.hard[pos];
                        }
                        size_t idx = static_cast<size_t>(j) * qm1 + c;
                        erased[idx] = gap;
                        values[idx] = gap ? 0 : acc;
                    }
                }
            }
            res = ctx.dec_epr->decode_bec(values, erased);
            extended_denominator = ctx.matrix().active_count();
            break;
        }
    }

    if (keep) *keep = res;
    out.iterations = res.iterations;
    if (plan.decoder == DecoderId::bec) {
        out.bit_errors = res.residual_erasures;
        out.frame_error = res.status != DecodeStatus::converged || res.xbar_hat != xbar;
        out.undetected = res.status == DecodeStatus::converged && res.xbar_hat != xbar;
        (void)extended_denominator;
    } else {
        long long errs = 0;
        for (size_t i = 0; i < xbar.size(); ++i) errs += (i < res.xbar_hat.size() && res.xbar_hat[i] != xbar[i]);
        out.bit_errors = errs;
        out.frame_error = errs > 0 || res.status != DecodeStatus::converged;
        out.undetected = res.status == DecodeStatus::converged && errs > 0;
    }
    return out;
}

void dump_frame(std::ofstream& out, const CodeSpec& spec, const ExperimentPlan& plan, uint64_t frame,
                const Received& rx) {
    // binary record: frame index, payload kind, length, raw payload
    uint64_t f = frame;
    out.write(reinterpret_cast<const char*>(&f), sizeof(f));
    uint32_t kind = static_cast<uint32_t>(rx.kind);
    out.write(reinterpret_cast<const char*>(&kind), sizeof(kind));
    if (rx.kind == ChannelKind::biawgn) {
        uint64_t len = rx.soft.size();
        out.write(reinterpret_cast<const char*>(&len), sizeof(len));
        out.write(reinterpret_cast<const char*>(rx.soft.data()), static_cast<std::streamsize>(len * sizeof(double)));
    } else {
        uint64_t len = rx.hard.size();
        out.write(reinterpret_cast<const char*>(&len), sizeof(len));
        std::vector<uint8_t> packed((len + 7) / 8, 0);
        for (uint64_t i = 0; i < len; ++i)
            if (rx.hard[i]) packed[i >> 3] |= uint8_t(1) << (i & 7);
        out.write(reinterpret_cast<const char*>(packed.data()), static_cast<std::streamsize>(packed.size()));
    }
    (void)spec;
    (void)plan;
}

} // namespace

SweepResult run_sweep(const CodeSpec& spec, const ExperimentPlan& plan) {
    validate_plan(spec, plan);
    SweepContext ctx{spec, plan, nullptr, nullptr};
    ctx.dec_epr = std::make_unique<EprDecoder>(spec.omega_e, spec.gens, spec.ctx->p(), plan.sched);
    ctx.dec_full = std::make_unique<EprDecoder>(spec.omega_epr, spec.omega_gens, spec.ctx->p(), plan.sched);

    std::ofstream dump;
    if (!plan.dump_frames_path.empty()) {
        dump.open(plan.dump_frames_path, std::ios::binary);
        if (!dump) throw std::runtime_error("cannot open frame dump: " + plan.dump_frames_path);
        // header: mode, bit length, master seed
        uint32_t mode = static_cast<uint32_t>(plan.mode);
        uint64_t nbits = static_cast<uint64_t>(spec.n_bits());
        uint64_t seed = plan.master_seed;
        dump.write(reinterpret_cast<const char*>(&mode), sizeof(mode));
        dump.write(reinterpret_cast<const char*>(&nbits), sizeof(nbits));
        dump.write(reinterpret_cast<const char*>(&seed), sizeof(seed));
    }

    std::ofstream trace;
    if (!plan.trace_path.empty()) {
        trace.open(plan.trace_path);
        if (!trace) throw std::runtime_error("cannot open trace: " + plan.trace_path);
        trace << "channel_param,iteration,syndrome_weight,flips\n";
    }

    SweepResult result;
    result.plan = plan;
    const int workers = std::max(1, plan.workers);
    for (size_t pi = 0; pi < plan.points.size(); ++pi) {
        const double param = plan.points[pi];
        auto t0 = std::chrono::steady_clock::now();
        if (trace.is_open()) {
            DecodeResult first;
            run_frame(ctx, static_cast<int>(pi), param, 0, &first);
            for (size_t it = 0; it < first.syndrome_trace.size(); ++it) {
                int flips = it < first.flip_trace.size() ? first.flip_trace[it] : 0;
                trace << param << ',' << (it + 1) << ',' << first.syndrome_trace[it] << ',' << flips << "\n";
            }
        }
        PointResult pr;
        pr.channel_param = param;
        pr.bits_per_frame = plan.decoder == DecoderId::bec
                                ? (plan.mode == TransmitMode::extended ? ctx.matrix().active_count()
                                                                       : ctx.matrix().active_count())
                                : spec.n_bits();
        long long total_iters = 0;
        const long long batch = 64;
        while (pr.frames < plan.max_frames && pr.frame_errors < plan.min_frame_errors) {
            long long take = std::min(batch, plan.max_frames - pr.frames);
            std::vector<FrameOutcome> outcomes(static_cast<size_t>(take));
            auto work = [&](int w) {
                for (long long k = w; k < take; k += workers)
                    outcomes[static_cast<size_t>(k)] =
                        run_frame(ctx, static_cast<int>(pi), param, static_cast<uint64_t>(pr.frames + k));
            };
            if (workers == 1) {
                work(0);
            } else {
                std::vector<std::thread> pool;
                for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
                for (auto& t : pool) t.join();
            }
            for (long long k = 0; k < take; ++k) {
                const auto& o = outcomes[static_cast<size_t>(k)];
                pr.bit_errors += o.bit_errors;
                pr.frame_errors += o.frame_error;
                pr.undetected += o.undetected;
                total_iters += o.iterations;
            }
            if (dump.is_open() && pi == 0 && pr.frames < 64) {
                // regenerate and dump the received frames of the first batch
                uint64_t ch_seed = CounterRng::derive(plan.master_seed, 0xC4, static_cast<uint64_t>(pi));
                auto ch = make_channel(plan, spec, param, ch_seed);
                for (long long k = 0; k < std::min<long long>(take, 64 - pr.frames); ++k) {
                    uint64_t f = static_cast<uint64_t>(pr.frames + k);
                    uint64_t info_seed = CounterRng::derive(plan.master_seed, 0x1F0A, static_cast<uint64_t>(pi));
                    auto info = random_info(spec, info_seed, f);
                    auto x = encode(spec, info);
                    auto xbar = to_bits(*spec.ctx, x);
                    std::vector<uint8_t> tx =
                        plan.mode == TransmitMode::extended ? extend_codeword(xbar, ctx.tx_gens(), spec.ctx->p()).bits
                                                            : xbar;
                    auto rx = transmit(ch, tx, f);
                    dump_frame(dump, spec, plan, f, rx);
                }
            }
            pr.frames += take;
        }
        pr.ber = pr.frames ? static_cast<double>(pr.bit_errors) /
                                 (static_cast<double>(pr.frames) * static_cast<double>(pr.bits_per_frame))
                           : 0.0;
        pr.fer = pr.frames ? static_cast<double>(pr.frame_errors) / static_cast<double>(pr.frames) : 0.0;
        auto ci = binomial_ci(pr.bit_errors, pr.frames * pr.bits_per_frame);
        pr.ci_low = ci.first;
        pr.ci_high = ci.second;
        pr.mean_iters = pr.frames ? static_cast<double>(total_iters) / static_cast<double>(pr.frames) : 0.0;
        if (plan.timing) {
            auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);
            pr.seconds = dt.count();
        }
        result.points.push_back(pr);
    }
    return result;
}

std::string SweepResult::csv() const {
    std::string out = "channel_param,frames,bit_errors,frame_errors,undetected,ber,fer,ci_low,ci_high,mean_iters,seconds\n";
    char buf[320];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof(buf), "%.6g,%lld,%lld,%lld,%lld,%.6e,%.6e,%.6e,%.6e,%.4f,%.3f\n",
                      p.channel_param, p.frames, p.bit_errors, p.frame_errors, p.undetected, p.ber, p.fer,
                      p.ci_low, p.ci_high, p.mean_iters, p.seconds);
        out += buf;
    }
    return out;
}

std::string SweepResult::svg() const {
    const double W = 640, H = 480, ml = 70, mr = 20, mt = 30, mb = 50;
    double xmin = points.front().channel_param, xmax = points.back().channel_param;
    if (xmax <= xmin) xmax = xmin + 1;
    const double floor_rate = 1e-8;
    auto xmap = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto ymap = [&](double r) {
        double lg = std::log10(std::max(r, floor_rate));
        return mt + (0.0 - lg) / 8.0 * (H - mt - mb);
    };
    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    os << "<text x='" << W / 2 << "' y='18' text-anchor='middle' font-size='14'>" << decoder_name(plan.decoder)
       << " error rates</text>\n";
    for (int d = 0; d <= 8; ++d) {
        double y = mt + d / 8.0 * (H - mt - mb);
        os << "<line x1='" << ml << "' y1='" << y << "' x2='" << W - mr << "' y2='" << y
           << "' stroke='#ddd'/>\n";
        os << "<text x='" << ml - 8 << "' y='" << y + 4 << "' text-anchor='end' font-size='10'>1e-" << d
           << "</text>\n";
    }
    for (const auto& p : points) {
        os << "<text x='" << xmap(p.channel_param) << "' y='" << H - mb + 16
           << "' text-anchor='middle' font-size='10'>" << p.channel_param << "</text>\n";
    }
    auto polyline = [&](bool fer, const char* color, const char* dash) {
        os << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5'" << dash << " points='";
        for (const auto& p : points) os << xmap(p.channel_param) << ',' << ymap(fer ? p.fer : p.ber) << ' ';
        os << "'/>\n";
    };
    polyline(false, "#c0392b", "");
    polyline(true, "#2980b9", " stroke-dasharray='6,3'");
    os << "<text x='" << W - mr - 4 << "' y='" << mt + 14
       << "' text-anchor='end' font-size='11' fill='#c0392b'>BER</text>\n";
    os << "<text x='" << W - mr - 4 << "' y='" << mt + 28
       << "' text-anchor='end' font-size='11' fill='#2980b9'>FER</text>\n";
    os << "<text x='" << (W + ml - mr) / 2 << "' y='" << H - 12 << "' text-anchor='middle' font-size='11'>"
       << (plan.channel == ChannelKind::biawgn ? "Eb/N0 [dB]"
                                               : (plan.channel == ChannelKind::bsc ? "crossover" : "erasure"))
       << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

namespace {

double entropy2(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double threshold_metric(const CodeSpec& spec, DecoderId decoder, ChannelKind kind, TransmitMode mode,
                        double param, const ThresholdOptions& opt) {
    HybridSchedule sched;
    sched.rounds = std::max(1, opt.iterations / (sched.mu + sched.nu));
    EprDecoder epr(spec.omega_e, spec.gens, spec.ctx->p(), sched);
    const int p = spec.ctx->p();
    std::vector<uint8_t> zero_bits(static_cast<size_t>(spec.n_bits()), 0);
    std::vector<double> ones;  // syndrome-bit one-counts
    double residual_sum = 0;
    long long denom = 0;
    for (int f = 0; f < opt.frames; ++f) {
        ChannelModel ch = kind == ChannelKind::bsc   ? ChannelModel::bsc(param, opt.seed)
                          : kind == ChannelKind::bec ? ChannelModel::bec(param, opt.seed)
                                                     : ChannelModel::biawgn_sigma(
                                                           ebn0_to_sigma(param, spec.rate_for(mode)), opt.seed);
        std::vector<uint8_t> tx = mode == TransmitMode::extended
                                      ? extend_codeword(zero_bits, spec.gens, p).bits
                                      : zero_bits;
        auto rx = transmit(ch, tx, static_cast<uint64_t>(f));
        if (kind == ChannelKind::bec && decoder == DecoderId::seb) {
            // plain peeling on the bit image (BP over a BEC reduces to it)
            const auto& hbar = spec.img.matrix;
            std::vector<uint8_t> gap = rx.erased;
            bool changed = true;
            while (changed) {
                changed = false;
                for (int r = 0; r < hbar.n_rows(); ++r) {
                    int gaps = 0, gap_col = -1;
                    for (int c : hbar.row(r)) {
                        if (gap[c]) {
                            ++gaps;
                            gap_col = c;
                            if (gaps > 1) break;
                        }
                    }
                    if (gaps == 1) {
                        gap[gap_col] = 0;
                        changed = true;
                    }
                }
            }
            residual_sum += static_cast<double>(std::count(gap.begin(), gap.end(), uint8_t(1)));
            denom += hbar.n_cols();
            continue;
        }
        if (decoder == DecoderId::bec || kind == ChannelKind::bec) {
            std::vector<uint8_t> values = rx.hard, erased = rx.erased;
            auto res = epr.decode_bec(values, erased);
            residual_sum += static_cast<double>(res.residual_erasures);
            denom += spec.omega_e.active_count();
            continue;
        }
        DecodeResult res;
        std::vector<uint8_t> syn;
        if (decoder == DecoderId::seb) {
            LLRVector llr = kind == ChannelKind::biawgn ? llr_init_direct(ch.sigma2(), rx.soft)
                                                        : llr_from_bsc(ch.param, rx.hard);
            res = decode_binary_bp(spec.img.matrix, llr, opt.iterations);
            syn = spec.img.matrix.mul_vec(res.xbar_hat);
        } else {
            LLRVector llr;
            if (mode == TransmitMode::extended)
                llr = llr_init_direct(ch.sigma2(), rx.soft, spec.omega_e.active);
            else
                llr = llr_init_indirect(ch.sigma2(), rx.soft, spec.gens, p);
            res = epr.decode_awgn(llr);
            syn = spec.omega_e.matrix.mul_vec(res.ve_hat);
        }
        if (ones.empty()) ones.assign(syn.size(), 0.0);
        for (size_t c = 0; c < syn.size(); ++c) ones[c] += syn[c];
    }
    if (denom) return residual_sum / static_cast<double>(denom);
    double h = 0;
    for (double n1 : ones) h += entropy2(n1 / opt.frames);
    return ones.empty() ? 0.0 : h / static_cast<double>(ones.size());
}

} // namespace

ThresholdEstimate estimate_threshold(const CodeSpec& spec, DecoderId decoder, ChannelKind kind,
                                     TransmitMode mode, const ThresholdOptions& opt) {
    if (kind == ChannelKind::bec && mode != TransmitMode::extended && decoder != DecoderId::seb)
        throw std::invalid_argument("estimate_threshold: extended-system erasure thresholds run in extended mode");
    ThresholdEstimate est;
    double lo = opt.lo, hi = opt.hi;
    double mlo = threshold_metric(spec, decoder, kind, mode, lo, opt);
    double mhi = threshold_metric(spec, decoder, kind, mode, hi, opt);
    est.trace.push_back({lo, mlo});
    est.trace.push_back({hi, mhi});
    bool rising = mhi > mlo;  // metric increases with the parameter (erasure case)
    double flo = mlo - opt.target, fhi = mhi - opt.target;
    if (flo * fhi > 0)
        throw std::invalid_argument("estimate_threshold: initial interval does not bracket the target");
    while (hi - lo > opt.tolerance) {
        double mid = 0.5 * (lo + hi);
        double m = threshold_metric(spec, decoder, kind, mode, mid, opt);
        est.trace.push_back({mid, m});
        bool above = m > opt.target;
        if (above == rising)
            hi = mid;
        else
            lo = mid;
    }
    est.lo = lo;
    est.hi = hi;
    est.t_b = 0.5 * (lo + hi);
    return est;
}

} // namespace eprldpc
