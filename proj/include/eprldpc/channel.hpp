#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "eprldpc/construction.hpp"
#include "eprldpc/representation.hpp"

namespace eprldpc {

inline constexpr double kLlrSaturation = 30.0;

enum class ChannelKind { bsc, bec, biawgn };
enum class TransmitMode { base, extended };

struct ChannelModel {
    ChannelKind kind = ChannelKind::biawgn;
    double param = 0.0;  // crossover / erasure probability / noise sigma
    uint64_t seed = 1;

    static ChannelModel bsc(double eps, uint64_t seed = 1);
    static ChannelModel bec(double delta, uint64_t seed = 1);
    static ChannelModel biawgn_sigma(double sigma, uint64_t seed = 1);
    /// sigma^2 = 1 / (2 R 10^(EbN0/10)) with R the rate actually transmitted.
    static ChannelModel biawgn_ebn0(double ebn0_db, double rate, uint64_t seed = 1);

    double sigma2() const { return param * param; }
};

double ebn0_to_sigma(double ebn0_db, double rate);

struct Received {
    ChannelKind kind;
    std::vector<uint8_t> hard;    // bsc / bec known values
    std::vector<uint8_t> erased;  // bec flags
    std::vector<double> soft;     // biawgn observations of 1 - 2b
};

/// Deterministic per (seed, frame, position): any frame regenerates in
/// isolation regardless of scheduling.
Received transmit(const ChannelModel& ch, std::span<const uint8_t> bits, uint64_t frame = 0);

using LLRVector = std::vector<double>;

/// 2y/sigma^2 per extended bit; masked (inactive) positions carry zero.
LLRVector llr_init_direct(double sigma2, std::span<const double> y, std::span<const uint8_t> active = {});

/// Extended-bit initialization from base-bit observations: magnitude is the
/// scaled minimum magnitude over the bit's source set, sign follows the xor
/// of the source hard decisions.
LLRVector llr_init_indirect(double sigma2, std::span<const double> ybar, const GeneratorSet& gens, int p);

LLRVector llr_from_bsc(double eps, std::span<const uint8_t> hard);
LLRVector llr_from_bec(std::span<const uint8_t> values, std::span<const uint8_t> erased);

/// Everything a decoder or sweep needs about one constructed code.
struct CodeSpec {
    std::shared_ptr<const FieldContext> ctx;
    NonBinaryMatrix h;
    BinaryImage img;
    ExtendedMatrix omega;
    GeneratorSet omega_gens;  // full generators for the plain extended matrix
    EPRMatrix omega_epr;      // omega in decoder form (trivial selection)
    EPRMatrix omega_e;
    GeneratorSet gens;
    int target_girth = 0;
    TransmitMode default_mode = TransmitMode::base;

    // encoder cache
    int rank_fq = 0;
    std::vector<int> pivot_cols, info_cols;
    std::vector<std::vector<std::pair<int, uint16_t>>> solve_rows;  // per pivot: (info col, coef)
    int rank_omega_e = 0;

    int n_sym() const { return h.n_sym; }
    int n_bits() const { return h.n_sym * ctx->p(); }
    long long m_s() const { return gens.m_s(); }
    double rate() const { return static_cast<double>(h.n_sym - rank_fq) / h.n_sym; }
    double extended_rate() const {
        return 1.0 - static_cast<double>(rank_omega_e) / static_cast<double>(m_s());
    }
    double rate_for(TransmitMode mode) const {
        return mode == TransmitMode::base ? rate() : extended_rate();
    }
};

CodeSpec make_code_spec(const OptimizedCode& code);
CodeSpec make_code_spec(std::shared_ptr<const FieldContext> ctx, NonBinaryMatrix h, int target_girth,
                        TransmitMode mode);

/// Systematic encoding through the cached reduced form; info length must be
/// N - rank(H).
std::vector<uint16_t> encode(const CodeSpec& spec, std::span<const uint16_t> info);
std::vector<uint16_t> random_info(const CodeSpec& spec, uint64_t seed, uint64_t frame);

} // namespace eprldpc
